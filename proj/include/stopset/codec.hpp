#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stopset/bitmatrix.hpp"
#include "stopset/erasure.hpp"
#include "stopset/ldpc.hpp"
#include "stopset/stopping.hpp"

namespace stopset {

// Invertible k x k scrambling pair. One decoding error anywhere in a block
// descrambles to roughly half the message bits flipped.
struct Scrambler {
    BitMatrix s;
    BitMatrix s_inv;
    std::uint64_t seed = 0;
};

// Samples uniform k x k binary matrices until one is invertible (success
// probability ~0.2888 per draw; the retry cap is a formality).
Scrambler gen_scrambler(std::size_t k, std::uint64_t seed);

BitVec scramble(const BitVec& m, const Scrambler& scr);
BitVec descramble(const BitVec& m_prime, const Scrambler& scr);

struct BatchMeta {
    std::size_t block_length = 0;  // N
    std::size_t dimension = 0;     // k
    std::size_t n = 0;             // post-puncturing blocklength
    std::string code_ref;
    std::string pattern_ref;
    std::uint64_t scrambler_seed = 0;
};

// Interleaved packet batch: packet i carries bits (i-1)*alpha+1 .. i*alpha of
// every punctured block, in block order. Erased packets are nullopt.
struct PacketBatch {
    std::size_t alpha = 0;
    std::size_t block_count = 0;  // L
    std::size_t eta = 0;          // n / alpha
    std::size_t packet_bits = 0;  // alpha * L
    std::vector<std::optional<BitVec>> packets;
    BatchMeta meta;

    bool complete() const {
        for (const auto& p : packets)
            if (!p) return false;
        return true;
    }
    std::vector<std::uint32_t> missing() const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < packets.size(); ++i)
            if (!packets[i]) out.push_back(static_cast<std::uint32_t>(i));
        return out;
    }
};

// Scramble, encode systematically, puncture to the transmitted set Q, and
// interleave into eta = n/alpha packets of alpha*L bits. The code must carry
// its generator (ensure_generator). alpha must divide n.
PacketBatch encode_batch(const std::vector<BitVec>& messages, const LdpcCode& code,
                         const Scrambler& scr, const PuncturePattern& pattern, std::size_t alpha);

// Inverse of the interleaver; requires a complete batch. Returns the L
// punctured blocks.
std::vector<BitVec> deinterleave(const PacketBatch& batch);

// Per-block received words over the full blocklength: punctured positions
// erased, bits of missing packets erased, everything else filled in.
std::vector<ErasureWord> to_erasure_words(const PacketBatch& batch,
                                          const PuncturePattern& pattern);

struct BobDecodeResult {
    bool decodable = false;  // false when packets are missing (re-request)
    std::vector<BitVec> blocks;
    std::vector<std::uint32_t> missing_packets;
};

// Legitimate pipeline: deinterleave, peel the puncturing (guaranteed by
// pattern acceptability), extract systematic bits, descramble.
BobDecodeResult bob_decode(const PacketBatch& batch, const LdpcCode& code, const Scrambler& scr,
                           const PuncturePattern& pattern);

// Eavesdropper-side accounting for one block.
struct EveBlockDof {
    std::size_t ml_dof = 0;       // free count of the ML system
    std::size_t mp_residual = 0;  // maximal stopping set size within the erasures
    // Bits that must be supplied for peeling to finish. Supplying the
    // channel-erased transmitted bits always suffices (the rest is the
    // stopping-set-free R), so this equals alpha * |R_p|; it is certified
    // minimal exactly when the ML dof meets it.
    std::size_t mp_supply = 0;
    bool mp_supply_exact = false;
    std::size_t systematic_missing = 0;  // systematic positions punctured or erased
    std::size_t effective_dof = 0;       // min(ml_dof, systematic_missing)
};

struct EveDofReport {
    std::vector<EveBlockDof> blocks;
    std::size_t erased_packets = 0;
    std::size_t channel_erased_per_block = 0;  // alpha * |R_p|
};

EveDofReport eve_dof_report(const PacketBatch& batch, const LdpcCode& code,
                            const PuncturePattern& pattern);

enum class CompletionPath { ml, mp };

struct GuessAttackResult {
    std::vector<BitVec> blocks;    // descrambled message estimates
    std::vector<double> block_ber;
    double overall_ber = 0.0;
};

// Complete each block from a guess and report bit error rates against the
// true messages. For the ML path the guess assigns the free variables of the
// block's linear system (ml_decode order); for the MP path it assigns the
// channel-erased transmitted positions in ascending order, after which
// peeling resolves the puncturing.
GuessAttackResult eve_guess_attack(const PacketBatch& received, const LdpcCode& code,
                                   const Scrambler& scr, const PuncturePattern& pattern,
                                   const std::vector<BitVec>& guesses,
                                   const std::vector<BitVec>& truth, CompletionPath path);

// Positions a guess refers to, per block (ascending variable indices for the
// MP path; ml_decode residual order for the ML path).
std::vector<std::uint32_t> mp_guess_positions(const PacketBatch& batch,
                                              const PuncturePattern& pattern);

// Batch file: one JSON header line, then one binary record per present
// packet: u32 packet_index, u32 L, u32 alpha (little endian), then the
// payload bits packed little-endian within bytes.
void save_batch(std::ostream& out, const PacketBatch& batch);
PacketBatch load_batch(std::istream& in);

}  // namespace stopset
