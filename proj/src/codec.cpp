#include "stopset/codec.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "stopset/errors.hpp"
#include "stopset/rng.hpp"

namespace stopset {

namespace {

constexpr int kScramblerRetryCap = 1000;

void require_generator(const LdpcCode& code) {
    if (!code.gen) throw std::logic_error("code has no generator; call ensure_generator first");
}

std::size_t block_dimension(const LdpcCode& code) {
    require_generator(code);
    return code.gen->g.rows();
}

}  // namespace

Scrambler gen_scrambler(std::size_t k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("gen_scrambler: k must be positive");
    Rng rng(substream(seed, {0x5c7a}));
    for (int attempt = 0; attempt < kScramblerRetryCap; ++attempt) {
        BitMatrix s = BitMatrix::random(k, k, rng);
        auto inv = invert(s);
        if (inv) return Scrambler{std::move(s), std::move(*inv), seed};
    }
    throw ConstructionError("gen_scrambler: retry cap exceeded");
}

BitVec scramble(const BitVec& m, const Scrambler& scr) {
    if (m.size() != scr.s.rows()) throw std::invalid_argument("scramble: length mismatch");
    return multiply(m, scr.s);
}

BitVec descramble(const BitVec& m_prime, const Scrambler& scr) {
    if (m_prime.size() != scr.s_inv.rows())
        throw std::invalid_argument("descramble: length mismatch");
    return multiply(m_prime, scr.s_inv);
}

PacketBatch encode_batch(const std::vector<BitVec>& messages, const LdpcCode& code,
                         const Scrambler& scr, const PuncturePattern& pattern,
                         std::size_t alpha) {
    const std::size_t k = block_dimension(code);
    if (pattern.punctured.size() + pattern.transmitted.size() != code.block_length)
        throw std::invalid_argument("encode_batch: pattern does not partition this code");
    const std::size_t n = pattern.n;
    if (alpha == 0 || n % alpha != 0)
        throw std::invalid_argument("encode_batch: alpha must divide n=" + std::to_string(n));
    if (messages.empty()) throw std::invalid_argument("encode_batch: no message blocks");
    for (const auto& m : messages)
        if (m.size() != k) throw std::invalid_argument("encode_batch: block length != k");

    const std::size_t block_count = messages.size();
    const std::size_t eta = n / alpha;

    // punctured blocks p^i = (m^i S) G restricted to Q
    std::vector<BitVec> punctured;
    punctured.reserve(block_count);
    for (const auto& m : messages) {
        BitVec codeword = multiply(scramble(m, scr), code.gen->g);
        BitVec p(n);
        for (std::size_t j = 0; j < n; ++j) p.set(j, codeword.get(pattern.transmitted[j]));
        punctured.push_back(std::move(p));
    }

    PacketBatch batch;
    batch.alpha = alpha;
    batch.block_count = block_count;
    batch.eta = eta;
    batch.packet_bits = alpha * block_count;
    batch.meta.block_length = code.block_length;
    batch.meta.dimension = k;
    batch.meta.n = n;
    batch.meta.code_ref = pattern.code_ref;
    batch.meta.scrambler_seed = scr.seed;
    batch.packets.resize(eta);
    for (std::size_t i = 0; i < eta; ++i) {
        BitVec packet(batch.packet_bits);
        for (std::size_t b = 0; b < block_count; ++b)
            for (std::size_t t = 0; t < alpha; ++t)
                packet.set(b * alpha + t, punctured[b].get(i * alpha + t));
        batch.packets[i] = std::move(packet);
    }
    return batch;
}

std::vector<BitVec> deinterleave(const PacketBatch& batch) {
    if (!batch.complete()) throw std::invalid_argument("deinterleave: batch has missing packets");
    std::vector<BitVec> blocks(batch.block_count, BitVec(batch.eta * batch.alpha));
    for (std::size_t i = 0; i < batch.eta; ++i) {
        const BitVec& packet = *batch.packets[i];
        for (std::size_t b = 0; b < batch.block_count; ++b)
            for (std::size_t t = 0; t < batch.alpha; ++t)
                blocks[b].set(i * batch.alpha + t, packet.get(b * batch.alpha + t));
    }
    return blocks;
}

std::vector<ErasureWord> to_erasure_words(const PacketBatch& batch,
                                          const PuncturePattern& pattern) {
    const std::size_t big_n = pattern.punctured.size() + pattern.transmitted.size();
    std::vector<ErasureWord> words(batch.block_count, ErasureWord(big_n));
    for (std::size_t i = 0; i < batch.eta; ++i) {
        if (!batch.packets[i]) continue;
        const BitVec& packet = *batch.packets[i];
        for (std::size_t b = 0; b < batch.block_count; ++b)
            for (std::size_t t = 0; t < batch.alpha; ++t)
                words[b].set_bit(pattern.transmitted[i * batch.alpha + t],
                                 packet.get(b * batch.alpha + t));
    }
    return words;
}

BobDecodeResult bob_decode(const PacketBatch& batch, const LdpcCode& code, const Scrambler& scr,
                           const PuncturePattern& pattern) {
    BobDecodeResult result;
    result.missing_packets = batch.missing();
    if (!result.missing_packets.empty()) return result;  // not decodable, re-request

    const std::size_t k = block_dimension(code);
    const auto& sys = code.gen->systematic_positions;
    auto words = to_erasure_words(batch, pattern);
    for (auto& word : words) {
        DecodeResult dec = mp_decode(code.graph, word);
        if (!dec.resolved)
            throw DecodeError("bob_decode: puncturing did not peel; pattern not acceptable");
        BitVec m_prime(k);
        for (std::size_t i = 0; i < k; ++i) m_prime.set(i, dec.word.bit(sys[i]));
        result.blocks.push_back(descramble(m_prime, scr));
    }
    result.decodable = true;
    return result;
}

EveDofReport eve_dof_report(const PacketBatch& batch, const LdpcCode& code,
                            const PuncturePattern& pattern) {
    EveDofReport report;
    report.erased_packets = batch.missing().size();
    report.channel_erased_per_block = report.erased_packets * batch.alpha;
    require_generator(code);
    const auto& sys = code.gen->systematic_positions;

    auto words = to_erasure_words(batch, pattern);
    for (auto& word : words) {
        EveBlockDof dof;
        dof.ml_dof = ml_decode(code.h, word).dof;
        dof.mp_residual = mp_decode(code.graph, word).dof;
        dof.mp_supply = report.channel_erased_per_block;
        dof.mp_supply_exact = (dof.ml_dof == dof.mp_supply);
        for (auto p : sys) dof.systematic_missing += word.is_erased(p) ? 1 : 0;
        dof.effective_dof = std::min(dof.ml_dof, dof.systematic_missing);
        report.blocks.push_back(dof);
    }
    return report;
}

std::vector<std::uint32_t> mp_guess_positions(const PacketBatch& batch,
                                              const PuncturePattern& pattern) {
    std::vector<std::uint32_t> positions;
    for (auto i : batch.missing())
        for (std::size_t t = 0; t < batch.alpha; ++t)
            positions.push_back(pattern.transmitted[i * batch.alpha + t]);
    std::sort(positions.begin(), positions.end());
    return positions;
}

GuessAttackResult eve_guess_attack(const PacketBatch& received, const LdpcCode& code,
                                   const Scrambler& scr, const PuncturePattern& pattern,
                                   const std::vector<BitVec>& guesses,
                                   const std::vector<BitVec>& truth, CompletionPath path) {
    if (guesses.size() != received.block_count || truth.size() != received.block_count)
        throw std::invalid_argument("eve_guess_attack: per-block guess/truth count mismatch");
    const std::size_t k = block_dimension(code);
    const auto& sys = code.gen->systematic_positions;

    GuessAttackResult result;
    auto words = to_erasure_words(received, pattern);
    const auto mp_positions = mp_guess_positions(received, pattern);

    for (std::size_t b = 0; b < received.block_count; ++b) {
        ErasureWord completed;
        if (path == CompletionPath::ml) {
            completed = guess_complete(code.h, words[b], guesses[b]);
        } else {
            if (guesses[b].size() != mp_positions.size())
                throw std::invalid_argument(
                    "eve_guess_attack: MP guess must cover the channel-erased bits");
            ErasureWord supplied = words[b];
            for (std::size_t i = 0; i < mp_positions.size(); ++i)
                supplied.set_bit(mp_positions[i], guesses[b].get(i));
            completed = mp_complete(code.graph, supplied);
            if (completed.erased_count() != 0)
                throw DecodeError("eve_guess_attack: peeling stalled; pattern not acceptable");
        }

        BitVec m_prime(k);
        for (std::size_t i = 0; i < k; ++i) m_prime.set(i, completed.bit(sys[i]));
        BitVec m_hat = descramble(m_prime, scr);

        std::size_t errors = 0;
        for (std::size_t i = 0; i < k; ++i) errors += (m_hat.get(i) != truth[b].get(i)) ? 1 : 0;
        result.block_ber.push_back(static_cast<double>(errors) / static_cast<double>(k));
        result.blocks.push_back(std::move(m_hat));
    }
    double sum = 0.0;
    for (double ber : result.block_ber) sum += ber;
    result.overall_ber = sum / static_cast<double>(result.block_ber.size());
    return result;
}

void save_batch(std::ostream& out, const PacketBatch& batch) {
    nlohmann::json header;
    header["N"] = batch.meta.block_length;
    header["k"] = batch.meta.dimension;
    header["n"] = batch.meta.n;
    header["alpha"] = batch.alpha;
    header["eta"] = batch.eta;
    header["L"] = batch.block_count;
    header["code_ref"] = batch.meta.code_ref;
    header["pattern_ref"] = batch.meta.pattern_ref;
    header["scrambler_seed"] = batch.meta.scrambler_seed;
    out << header.dump() << '\n';

    const std::size_t payload_bytes = (batch.packet_bits + 7) / 8;
    auto put_u32 = [&out](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    for (std::size_t i = 0; i < batch.packets.size(); ++i) {
        if (!batch.packets[i]) continue;
        put_u32(static_cast<std::uint32_t>(i));
        put_u32(static_cast<std::uint32_t>(batch.block_count));
        put_u32(static_cast<std::uint32_t>(batch.alpha));
        const BitVec& packet = *batch.packets[i];
        for (std::size_t byte = 0; byte < payload_bytes; ++byte) {
            unsigned char value = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const std::size_t pos = byte * 8 + bit;
                if (pos < batch.packet_bits && packet.get(pos)) value |= (1u << bit);
            }
            out.put(static_cast<char>(value));
        }
    }
}

PacketBatch load_batch(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error("batch: missing header");
    nlohmann::json header = nlohmann::json::parse(header_line);

    PacketBatch batch;
    batch.meta.block_length = header.at("N").get<std::size_t>();
    batch.meta.dimension = header.at("k").get<std::size_t>();
    batch.meta.n = header.at("n").get<std::size_t>();
    batch.alpha = header.at("alpha").get<std::size_t>();
    batch.eta = header.at("eta").get<std::size_t>();
    batch.block_count = header.at("L").get<std::size_t>();
    batch.meta.code_ref = header.at("code_ref").get<std::string>();
    batch.meta.pattern_ref = header.at("pattern_ref").get<std::string>();
    batch.meta.scrambler_seed = header.at("scrambler_seed").get<std::uint64_t>();
    if (batch.alpha == 0 || batch.eta * batch.alpha != batch.meta.n)
        throw std::runtime_error("batch: inconsistent header");
    batch.packet_bits = batch.alpha * batch.block_count;
    batch.packets.assign(batch.eta, std::nullopt);

    const std::size_t payload_bytes = (batch.packet_bits + 7) / 8;
    auto get_u32 = [&in](std::uint32_t& v) {
        char bytes[4];
        if (!in.read(bytes, 4)) return false;
        v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
        return true;
    };
    std::uint32_t index = 0;
    while (get_u32(index)) {
        std::uint32_t l = 0, alpha = 0;
        if (!get_u32(l) || !get_u32(alpha)) throw std::runtime_error("batch: truncated record");
        if (index >= batch.eta || l != batch.block_count || alpha != batch.alpha)
            throw std::runtime_error("batch: record disagrees with header");
        std::vector<char> payload(payload_bytes);
        if (!in.read(payload.data(), static_cast<std::streamsize>(payload_bytes)))
            throw std::runtime_error("batch: truncated payload");
        BitVec packet(batch.packet_bits);
        for (std::size_t pos = 0; pos < batch.packet_bits; ++pos)
            if ((static_cast<unsigned char>(payload[pos / 8]) >> (pos % 8)) & 1)
                packet.set(pos, true);
        if (batch.packets[index])
            throw std::runtime_error("batch: duplicate packet record");
        batch.packets[index] = std::move(packet);
    }
    return batch;
}

}  // namespace stopset
