#include "stopset/channel.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "stopset/errors.hpp"
#include "stopset/rng.hpp"

namespace stopset {

namespace {

constexpr std::uint32_t kArqRoundCap = 1000000;

}  // namespace

ChannelTopology::ChannelTopology(std::vector<double> receiver_deltas,
                                 std::vector<double> eve_epsilons)
    : deltas(std::move(receiver_deltas)), epsilons(std::move(eve_epsilons)) {
    if (deltas.empty()) throw std::invalid_argument("topology: need at least one receiver");
    if (epsilons.empty()) throw std::invalid_argument("topology: need at least one eavesdropper");
    for (double d : deltas) {
        if (d < 0.0 || d > 1.0) throw std::invalid_argument("topology: delta outside [0,1]");
        if (d == 1.0) throw std::invalid_argument("topology: delta=1 never terminates ARQ");
    }
    for (double e : epsilons)
        if (e < 0.0 || e > 1.0) throw std::invalid_argument("topology: epsilon outside [0,1]");
}

PacketOutcome transmit_packet(const ChannelTopology& topology, std::uint64_t packet_seed) {
    PacketOutcome outcome;

    // Geometric round counts per receiver on independent substreams; the
    // broadcast serves everyone, so W is their maximum.
    for (std::size_t i = 0; i < topology.receivers(); ++i) {
        Rng rng(substream(packet_seed, {1, i}));
        std::uint32_t rounds = 1;
        while (rng.uniform01() < topology.deltas[i]) {
            if (++rounds > kArqRoundCap)
                throw ChannelError("transmit_packet: retransmission cap exceeded");
        }
        outcome.transmissions = std::max(outcome.transmissions, rounds);
    }

    // Every eavesdropper watches each of the W transmissions independently.
    for (std::size_t j = 0; j < topology.eavesdroppers() && !outcome.eve_received; ++j) {
        Rng rng(substream(packet_seed, {2, j}));
        for (std::uint32_t t = 0; t < outcome.transmissions; ++t) {
            if (rng.uniform01() >= topology.epsilons[j]) {
                outcome.eve_received = true;
                break;
            }
        }
    }
    return outcome;
}

SessionTrace run_session(const ChannelTopology& topology, std::size_t eta, std::size_t alpha,
                         std::uint64_t seed) {
    if (eta < 1) throw std::invalid_argument("run_session: eta must be positive");
    SessionTrace trace;
    trace.alpha = alpha;
    trace.seed = seed;
    trace.packets.reserve(eta);
    for (std::size_t p = 0; p < eta; ++p) {
        trace.packets.push_back(transmit_packet(topology, substream(seed, {0xa49, p})));
        if (!trace.packets.back().eve_received)
            trace.erased_packets.push_back(static_cast<std::uint32_t>(p));
    }
    trace.dof = alpha * trace.erased_packets.size();
    return trace;
}

void write_trace_csv(std::ostream& out, const SessionTrace& trace) {
    out << "packet_index,W,eve_received\n";
    for (std::size_t p = 0; p < trace.packets.size(); ++p)
        out << p << ',' << trace.packets[p].transmissions << ','
            << (trace.packets[p].eve_received ? 1 : 0) << '\n';
}

void write_session_summary_json(std::ostream& out, const ChannelTopology& topology,
                                const SessionTrace& trace) {
    nlohmann::json j;
    j["m"] = topology.receivers();
    j["l"] = topology.eavesdroppers();
    j["deltas"] = topology.deltas;
    j["epsilons"] = topology.epsilons;
    j["eta"] = trace.packets.size();
    j["alpha"] = trace.alpha;
    j["R_p"] = trace.erased_packets;
    j["D"] = trace.dof;
    j["seed"] = trace.seed;
    out << j.dump() << '\n';
}

E2eOutcome run_e2e(const ChannelTopology& topology, const std::vector<BitVec>& messages,
                   const LdpcCode& code, const Scrambler& scr, const PuncturePattern& pattern,
                   std::size_t alpha, std::uint64_t seed) {
    PacketBatch batch = encode_batch(messages, code, scr, pattern, alpha);

    E2eOutcome outcome;
    outcome.trace = run_session(topology, batch.eta, alpha, seed);

    // ARQ runs until every legitimate receiver holds every packet, so each
    // of them decodes from the complete batch.
    auto bob = bob_decode(batch, code, scr, pattern);
    const bool ok = bob.decodable && bob.blocks == messages;
    outcome.receiver_ok.assign(topology.receivers(), ok);

    PacketBatch eve_batch = batch;
    for (auto p : outcome.trace.erased_packets) eve_batch.packets[p].reset();
    outcome.eve_complete = outcome.trace.erased_packets.empty();
    if (outcome.eve_complete) {
        auto eve = bob_decode(eve_batch, code, scr, pattern);
        outcome.eve_exact = eve.decodable && eve.blocks == messages;
        outcome.eve_blocks = std::move(eve.blocks);
    } else {
        outcome.eve_dof = eve_dof_report(eve_batch, code, pattern);
    }
    return outcome;
}

}  // namespace stopset
