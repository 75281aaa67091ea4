#include "stopset/stopping.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "stopset/rng.hpp"

namespace stopset {

namespace {

// Subgraph peeler with reusable buffers: one instance serves the ~N stopping
// set queries of a pattern search without reallocating.
class Peeler {
public:
    explicit Peeler(const TannerGraph& graph)
        : graph_(graph), in_set_(graph.var_count, 0), degree_(graph.check_count, 0) {}

    // Peels `subset`; survivors are the maximal stopping set. Returns the
    // survivor count; survivors() is valid until the next call.
    std::size_t peel(std::span<const std::uint32_t> subset) {
        members_.clear();
        touched_.clear();
        queue_.clear();
        for (auto v : subset) {
            if (v >= graph_.var_count)
                throw std::invalid_argument("stopping set query: variable index out of range");
            if (in_set_[v]) continue;
            in_set_[v] = 1;
            members_.push_back(v);
            for (auto c : graph_.var_neighbors[v]) {
                if (degree_[c] == 0) touched_.push_back(c);
                ++degree_[c];
            }
        }
        for (auto c : touched_)
            if (degree_[c] == 1) queue_.push_back(c);

        std::size_t survivors = members_.size();
        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const auto c = queue_[head];
            if (degree_[c] != 1) continue;
            std::uint32_t victim = 0;
            for (auto v : graph_.check_neighbors[c]) {
                if (in_set_[v]) {
                    victim = v;
                    break;
                }
            }
            in_set_[victim] = 0;
            --survivors;
            for (auto c2 : graph_.var_neighbors[victim]) {
                --degree_[c2];
                if (degree_[c2] == 1) queue_.push_back(c2);
            }
        }
        return survivors;
    }

    std::vector<std::uint32_t> survivors() const {
        std::vector<std::uint32_t> out;
        for (auto v : members_)
            if (in_set_[v]) out.push_back(v);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Restore buffers to the all-clear state for the next query.
    void reset() {
        for (auto v : members_) in_set_[v] = 0;
        for (auto c : touched_) degree_[c] = 0;
    }

private:
    const TannerGraph& graph_;
    std::vector<std::uint8_t> in_set_;
    std::vector<std::uint32_t> degree_;
    std::vector<std::uint32_t> members_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint32_t> queue_;
};

}  // namespace

std::vector<std::uint32_t> find_maximal(const TannerGraph& graph,
                                        std::span<const std::uint32_t> subset) {
    Peeler peeler(graph);
    peeler.peel(subset);
    auto out = peeler.survivors();
    peeler.reset();
    return out;
}

PuncturePattern find_acceptable_pattern(const TannerGraph& graph, std::uint64_t seed) {
    std::vector<std::uint32_t> order(graph.var_count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(substream(seed, {0xacce97}));
    rng.shuffle(order);

    Peeler peeler(graph);
    PuncturePattern pattern;
    pattern.seed = seed;
    std::vector<std::uint32_t> candidate;
    candidate.reserve(graph.var_count);
    for (auto v : order) {
        candidate.push_back(v);
        const std::size_t survivors = peeler.peel(candidate);
        peeler.reset();
        if (survivors == 0) {
            pattern.punctured.push_back(v);
        } else {
            candidate.pop_back();
            pattern.transmitted.push_back(v);
        }
    }
    std::sort(pattern.punctured.begin(), pattern.punctured.end());
    std::sort(pattern.transmitted.begin(), pattern.transmitted.end());
    pattern.n = pattern.transmitted.size();
    return pattern;
}

AcceptabilityReport verify_acceptable(const TannerGraph& graph, const PuncturePattern& pattern) {
    AcceptabilityReport report;
    std::vector<std::uint8_t> seen(graph.var_count, 0);
    for (auto v : pattern.punctured) {
        if (v >= graph.var_count || seen[v]++) {
            report.offending_node = v;
            report.reason = "R is not part of a partition of V";
            return report;
        }
    }
    for (auto v : pattern.transmitted) {
        if (v >= graph.var_count || seen[v]++) {
            report.offending_node = v;
            report.reason = "Q is not part of a partition of V";
            return report;
        }
    }
    if (pattern.punctured.size() + pattern.transmitted.size() != graph.var_count) {
        report.reason = "R and Q do not cover V";
        return report;
    }

    Peeler peeler(graph);
    const std::size_t r_survivors = peeler.peel(pattern.punctured);
    auto inside = peeler.survivors();
    peeler.reset();
    if (r_survivors != 0) {
        report.offending_node = inside.front();
        report.reason = "stopping set inside R";
        return report;
    }

    std::vector<std::uint32_t> candidate(pattern.punctured.begin(), pattern.punctured.end());
    candidate.push_back(0);
    for (auto v : pattern.transmitted) {
        candidate.back() = v;
        const std::size_t survivors = peeler.peel(candidate);
        peeler.reset();
        if (survivors == 0) {
            report.offending_node = v;
            report.reason = "adding transmitted node to R creates no stopping set";
            return report;
        }
    }
    report.acceptable = true;
    return report;
}

void save_pattern(std::ostream& out, const PuncturePattern& pattern) {
    nlohmann::json j;
    j["code_ref"] = pattern.code_ref;
    j["seed"] = pattern.seed;
    j["R"] = pattern.punctured;
    j["n"] = pattern.n;
    out << j.dump() << '\n';
}

PuncturePattern load_pattern(std::istream& in, std::size_t var_count) {
    nlohmann::json j;
    in >> j;
    PuncturePattern pattern;
    pattern.code_ref = j.at("code_ref").get<std::string>();
    pattern.seed = j.at("seed").get<std::uint64_t>();
    pattern.punctured = j.at("R").get<std::vector<std::uint32_t>>();
    pattern.n = j.at("n").get<std::size_t>();

    std::vector<std::uint8_t> in_r(var_count, 0);
    for (auto v : pattern.punctured) {
        if (v >= var_count) throw std::runtime_error("pattern: index out of range");
        if (in_r[v]) throw std::runtime_error("pattern: duplicate index in R");
        in_r[v] = 1;
    }
    if (!std::is_sorted(pattern.punctured.begin(), pattern.punctured.end()))
        throw std::runtime_error("pattern: R is not sorted");
    for (std::uint32_t v = 0; v < var_count; ++v)
        if (!in_r[v]) pattern.transmitted.push_back(v);
    if (pattern.n != pattern.transmitted.size())
        throw std::runtime_error("pattern: stored n disagrees with |V| - |R|");
    return pattern;
}

}  // namespace stopset
