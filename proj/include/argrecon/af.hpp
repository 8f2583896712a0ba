#ifndef ARGRECON_AF_HPP
#define ARGRECON_AF_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace argrecon {

using ArgumentId = std::string;
using ArgIndex = std::uint32_t;

// Finite directed attack graph. Arguments keep their insertion order, which
// is the order used for every deterministic traversal and output.
class AttackGraph {
public:
    // Returns the index of `id`, adding it if it is new.
    ArgIndex add_argument(std::string_view id);
    // Both endpoints must already exist. Duplicate edges are ignored.
    void add_attack(std::string_view attacker, std::string_view target);
    void add_attack(ArgIndex attacker, ArgIndex target);

    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }
    std::size_t attack_count() const noexcept { return attack_count_; }

    const ArgumentId& name(ArgIndex arg) const { return names_.at(arg); }
    const std::vector<ArgumentId>& names() const noexcept { return names_; }
    std::optional<ArgIndex> find(std::string_view id) const;
    ArgIndex index_of(std::string_view id) const; // throws not_found

    std::span<const ArgIndex> attackers(ArgIndex arg) const { return attackers_.at(arg); }
    std::span<const ArgIndex> targets(ArgIndex arg) const { return targets_.at(arg); }
    bool attacks(ArgIndex attacker, ArgIndex target) const;

    // All edges ordered by (attacker index, target index).
    std::vector<std::pair<ArgIndex, ArgIndex>> edges() const;

private:
    std::vector<ArgumentId> names_;
    std::unordered_map<ArgumentId, ArgIndex> index_;
    std::vector<std::vector<ArgIndex>> attackers_;
    std::vector<std::vector<ArgIndex>> targets_;
    std::size_t attack_count_ = 0;
};

enum class Label : std::uint8_t { in, out, undec };

std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

// Total assignment of labels, indexed by the ArgIndex of the graph it was
// computed for.
class Labeling {
public:
    Labeling() = default;
    explicit Labeling(std::size_t size, Label fill = Label::undec) : labels_(size, fill) {}
    explicit Labeling(std::vector<Label> labels) : labels_(std::move(labels)) {}

    std::size_t size() const noexcept { return labels_.size(); }
    Label operator[](ArgIndex arg) const { return labels_[arg]; }
    Label& operator[](ArgIndex arg) { return labels_[arg]; }
    std::span<const Label> labels() const noexcept { return labels_; }

    std::size_t count(Label label) const;
    // Arguments carrying `label`, in index order.
    std::vector<ArgIndex> with(Label label) const;

    friend bool operator==(const Labeling&, const Labeling&) = default;

private:
    std::vector<Label> labels_;
};

// Sorted argument names labeled `label`.
std::vector<ArgumentId> names_with(const AttackGraph& graph, const Labeling& labeling, Label label);

// Grounded labeling: least fixpoint of "IN when every attacker is OUT,
// OUT when some attacker is IN".
Labeling grounded_labeling(const AttackGraph& graph);

struct StableEnumeration {
    std::vector<Labeling> labelings; // canonical order
    bool truncated = false;          // stopped at the cap; count is a lower bound
};

// Every two-valued legal labeling, ordered lexicographically by the sorted
// names of the IN set. With a cap, at most `cap` labelings are searched for.
StableEnumeration enumerate_stable(const AttackGraph& graph,
                                   std::optional<std::size_t> cap = std::nullopt);

inline std::vector<Labeling> stable_labelings(const AttackGraph& graph) {
    return enumerate_stable(graph).labelings;
}

enum class Verdict { stable, grounded_consistent, illegal };

std::string_view to_string(Verdict verdict);

enum class ViolationKind {
    conflict,     // IN argument attacked by an IN argument
    illegal_in,   // IN argument with an attacker that is not OUT
    illegal_out,  // OUT argument without an IN attacker
    illegal_undec // UNDEC argument with an IN attacker, or whose attackers are all OUT
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    ArgumentId argument;
    std::optional<ArgumentId> witness; // the attacker responsible, when there is one

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct Verification {
    Verdict verdict = Verdict::illegal;
    bool is_grounded = false; // identical to the grounded labeling
    std::vector<Violation> violations;
};

// Checks the labeling against the complete-labeling conditions. A legal
// labeling without UNDEC is stable; a legal one with UNDEC refines the
// grounded labeling and is reported as grounded-consistent.
Verification verify_labeling(const AttackGraph& graph, const Labeling& labeling);

// Canonical order used for stable labelings.
bool canonical_less(const AttackGraph& graph, const Labeling& lhs, const Labeling& rhs);

// {"a": "in", "b": "out", ...}
nlohmann::json labeling_to_json(const AttackGraph& graph, const Labeling& labeling);
// Rejects unknown ids, unknown labels and labelings that are not total.
Labeling labeling_from_json(const AttackGraph& graph, const nlohmann::json& value);

} // namespace argrecon

#endif
