#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stopset/codec.hpp"

namespace stopset {

// Erasure probabilities of the m legitimate receivers (deltas) and l
// collaborating eavesdroppers (epsilons). Erasures are independent across
// parties, packets, and retransmissions.
struct ChannelTopology {
    std::vector<double> deltas;
    std::vector<double> epsilons;

    ChannelTopology(std::vector<double> receiver_deltas, std::vector<double> eve_epsilons);
    std::size_t receivers() const { return deltas.size(); }
    std::size_t eavesdroppers() const { return epsilons.size(); }
};

struct PacketOutcome {
    std::uint32_t transmissions = 0;  // W = max over receivers of geometric rounds
    bool eve_received = false;        // coalition saw at least one copy
};

// One packet through the ARQ loop: every receiver requests retransmission
// until it holds the packet, each (re)transmission is broadcast, and every
// eavesdropper observes every transmission independently. Per-party
// substreams are derived from the packet seed, so outcomes are reproducible
// under any parallel schedule.
PacketOutcome transmit_packet(const ChannelTopology& topology, std::uint64_t packet_seed);

struct SessionTrace {
    std::vector<PacketOutcome> packets;
    std::vector<std::uint32_t> erased_packets;  // R_p: coalition-missed indices
    std::size_t alpha = 0;
    std::size_t dof = 0;  // D = alpha * |R_p|
    std::uint64_t seed = 0;
};

SessionTrace run_session(const ChannelTopology& topology, std::size_t eta, std::size_t alpha,
                         std::uint64_t seed);

// CSV rows packet_index,W,eve_received.
void write_trace_csv(std::ostream& out, const SessionTrace& trace);
// JSON {m, l, deltas, epsilons, eta, alpha, R_p, D, seed}.
void write_session_summary_json(std::ostream& out, const ChannelTopology& topology,
                                const SessionTrace& trace);

struct E2eOutcome {
    SessionTrace trace;
    std::vector<bool> receiver_ok;   // per legitimate receiver: decoded M exactly
    bool eve_complete = false;       // coalition got every packet
    bool eve_exact = false;          // and therefore decoded M exactly
    std::vector<BitVec> eve_blocks;  // populated when eve_complete
    EveDofReport eve_dof;            // populated when packets were missed
};

// Full pipeline: encode, run the ARQ session, decode for every legitimate
// receiver (all packets were retransmitted until held, so each decodes
// exactly), and give the eavesdropper coalition the union of what its
// members received.
E2eOutcome run_e2e(const ChannelTopology& topology, const std::vector<BitVec>& messages,
                   const LdpcCode& code, const Scrambler& scr, const PuncturePattern& pattern,
                   std::size_t alpha, std::uint64_t seed);

}  // namespace stopset
