#include "argrecon/af.hpp"

#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

#include "argrecon/error.hpp"

namespace argrecon {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::unresolved_conflicts: return "unresolved_conflicts";
    case ErrorCode::dependency_cycle: return "dependency_cycle";
    case ErrorCode::execution_error: return "execution_error";
    case ErrorCode::invalid_state: return "invalid_state";
    }
    return "unknown";
}

// ---------------------------------------------------------------- graph

ArgIndex AttackGraph::add_argument(std::string_view id) {
    if (id.empty()) {
        throw Error(ErrorCode::invalid_argument, "argument id must not be empty");
    }
    if (auto found = find(id)) {
        return *found;
    }
    auto arg = static_cast<ArgIndex>(names_.size());
    names_.emplace_back(id);
    index_.emplace(names_.back(), arg);
    attackers_.emplace_back();
    targets_.emplace_back();
    return arg;
}

void AttackGraph::add_attack(std::string_view attacker, std::string_view target) {
    add_attack(index_of(attacker), index_of(target));
}

void AttackGraph::add_attack(ArgIndex attacker, ArgIndex target) {
    if (attacker >= size() || target >= size()) {
        throw Error(ErrorCode::not_found, "attack endpoint out of range");
    }
    if (attacks(attacker, target)) {
        return;
    }
    targets_[attacker].push_back(target);
    attackers_[target].push_back(attacker);
    ++attack_count_;
}

std::optional<ArgIndex> AttackGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ArgIndex AttackGraph::index_of(std::string_view id) const {
    if (auto found = find(id)) {
        return *found;
    }
    throw Error(ErrorCode::not_found, "undeclared argument `" + std::string(id) + "`",
                {std::string(id)});
}

bool AttackGraph::attacks(ArgIndex attacker, ArgIndex target) const {
    const auto& out = targets_.at(attacker);
    return std::find(out.begin(), out.end(), target) != out.end();
}

std::vector<std::pair<ArgIndex, ArgIndex>> AttackGraph::edges() const {
    std::vector<std::pair<ArgIndex, ArgIndex>> result;
    result.reserve(attack_count_);
    for (ArgIndex from = 0; from < size(); ++from) {
        for (ArgIndex to : targets_[from]) {
            result.emplace_back(from, to);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ---------------------------------------------------------------- labels

std::string_view to_string(Label label) {
    switch (label) {
    case Label::in: return "in";
    case Label::out: return "out";
    case Label::undec: return "undec";
    }
    return "undec";
}

Label label_from_string(std::string_view text) {
    if (text == "in") return Label::in;
    if (text == "out") return Label::out;
    if (text == "undec") return Label::undec;
    throw Error(ErrorCode::parse_error, "unknown label `" + std::string(text) + "`");
}

std::size_t Labeling::count(Label label) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::vector<ArgIndex> Labeling::with(Label label) const {
    std::vector<ArgIndex> result;
    for (ArgIndex arg = 0; arg < labels_.size(); ++arg) {
        if (labels_[arg] == label) {
            result.push_back(arg);
        }
    }
    return result;
}

std::vector<ArgumentId> names_with(const AttackGraph& graph, const Labeling& labeling, Label label) {
    std::vector<ArgumentId> result;
    for (ArgIndex arg : labeling.with(label)) {
        result.push_back(graph.name(arg));
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ---------------------------------------------------------------- grounded

Labeling grounded_labeling(const AttackGraph& graph) {
    const auto n = graph.size();
    Labeling labeling(n);
    // number of attackers not yet labeled OUT
    std::vector<std::size_t> live_attackers(n);
    std::deque<ArgIndex> accepted;
    for (ArgIndex arg = 0; arg < n; ++arg) {
        live_attackers[arg] = graph.attackers(arg).size();
        if (live_attackers[arg] == 0) {
            labeling[arg] = Label::in;
            accepted.push_back(arg);
        }
    }
    while (!accepted.empty()) {
        ArgIndex arg = accepted.front();
        accepted.pop_front();
        for (ArgIndex defeated : graph.targets(arg)) {
            if (labeling[defeated] != Label::undec) {
                continue;
            }
            labeling[defeated] = Label::out;
            for (ArgIndex next : graph.targets(defeated)) {
                if (--live_attackers[next] == 0 && labeling[next] == Label::undec) {
                    labeling[next] = Label::in;
                    accepted.push_back(next);
                }
            }
        }
    }
    return labeling;
}

// ---------------------------------------------------------------- stable

bool canonical_less(const AttackGraph& graph, const Labeling& lhs, const Labeling& rhs) {
    return names_with(graph, lhs, Label::in) < names_with(graph, rhs, Label::in);
}

namespace {

// Depth-first search over two-valued completions of the grounded labeling.
// UNDEC marks an argument that is still unassigned.
class StableSearch {
public:
    StableSearch(const AttackGraph& graph, std::optional<std::size_t> cap)
        : graph_(graph), cap_(cap) {}

    StableEnumeration run() {
        StableEnumeration result;
        Labeling start = grounded_labeling(graph_);
        if (propagate(start)) {
            search(std::move(start), result);
        }
        // reaching the cap means the count is only a lower bound
        result.truncated = full(result);
        std::vector<std::pair<std::vector<ArgumentId>, Labeling>> keyed;
        keyed.reserve(result.labelings.size());
        for (auto& labeling : result.labelings) {
            keyed.emplace_back(names_with(graph_, labeling, Label::in), std::move(labeling));
        }
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        result.labelings.clear();
        for (auto& [key, labeling] : keyed) {
            result.labelings.push_back(std::move(labeling));
        }
        return result;
    }

private:
    bool full(const StableEnumeration& result) const {
        return cap_ && result.labelings.size() >= *cap_;
    }

    void search(Labeling labeling, StableEnumeration& result) {
        if (full(result)) {
            return;
        }
        std::optional<ArgIndex> open;
        for (ArgIndex arg = 0; arg < labeling.size(); ++arg) {
            if (labeling[arg] == Label::undec) {
                open = arg;
                break;
            }
        }
        if (!open) {
            if (verify_labeling(graph_, labeling).verdict == Verdict::stable) {
                result.labelings.push_back(std::move(labeling));
            }
            return;
        }
        for (Label choice : {Label::in, Label::out}) {
            Labeling branch = labeling;
            branch[*open] = choice;
            if (propagate(branch)) {
                search(std::move(branch), result);
            }
        }
    }

    // Applies the forced consequences of a two-valued labeling until nothing
    // changes. Returns false on contradiction.
    bool propagate(Labeling& labeling) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (ArgIndex arg = 0; arg < labeling.size(); ++arg) {
                auto attackers = graph_.attackers(arg);
                std::size_t in_attackers = 0;
                std::size_t open_attackers = 0;
                std::optional<ArgIndex> last_open;
                for (ArgIndex attacker : attackers) {
                    switch (labeling[attacker]) {
                    case Label::in: ++in_attackers; break;
                    case Label::undec: ++open_attackers; last_open = attacker; break;
                    case Label::out: break;
                    }
                }
                switch (labeling[arg]) {
                case Label::in:
                    if (in_attackers > 0) {
                        return false;
                    }
                    for (ArgIndex attacker : attackers) {
                        if (labeling[attacker] == Label::undec) {
                            labeling[attacker] = Label::out;
                            changed = true;
                        }
                    }
                    for (ArgIndex target : graph_.targets(arg)) {
                        if (labeling[target] == Label::in) {
                            return false;
                        }
                        if (labeling[target] == Label::undec) {
                            labeling[target] = Label::out;
                            changed = true;
                        }
                    }
                    break;
                case Label::out:
                    if (in_attackers == 0) {
                        if (open_attackers == 0) {
                            return false;
                        }
                        if (open_attackers == 1) {
                            labeling[*last_open] = Label::in;
                            changed = true;
                        }
                    }
                    break;
                case Label::undec:
                    if (in_attackers > 0) {
                        labeling[arg] = Label::out;
                        changed = true;
                    } else if (open_attackers == 0) {
                        labeling[arg] = Label::in;
                        changed = true;
                    }
                    break;
                }
            }
        }
        return true;
    }

    const AttackGraph& graph_;
    std::optional<std::size_t> cap_;
};

} // namespace

StableEnumeration enumerate_stable(const AttackGraph& graph, std::optional<std::size_t> cap) {
    return StableSearch(graph, cap).run();
}

// ---------------------------------------------------------------- verify

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::stable: return "stable";
    case Verdict::grounded_consistent: return "grounded-consistent";
    case Verdict::illegal: return "illegal";
    }
    return "illegal";
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::conflict: return "conflict";
    case ViolationKind::illegal_in: return "illegal_in";
    case ViolationKind::illegal_out: return "illegal_out";
    case ViolationKind::illegal_undec: return "illegal_undec";
    }
    return "unknown";
}

Verification verify_labeling(const AttackGraph& graph, const Labeling& labeling) {
    if (labeling.size() != graph.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "labeling covers " + std::to_string(labeling.size()) + " of " +
                        std::to_string(graph.size()) + " arguments");
    }
    Verification result;
    for (ArgIndex arg = 0; arg < graph.size(); ++arg) {
        const auto& name = graph.name(arg);
        auto attackers = graph.attackers(arg);
        std::optional<ArgIndex> in_attacker;
        std::optional<ArgIndex> live_attacker; // any attacker not OUT
        for (ArgIndex attacker : attackers) {
            if (labeling[attacker] == Label::in && !in_attacker) {
                in_attacker = attacker;
            }
            if (labeling[attacker] != Label::out && !live_attacker) {
                live_attacker = attacker;
            }
        }
        switch (labeling[arg]) {
        case Label::in:
            if (in_attacker) {
                result.violations.push_back(
                    {ViolationKind::conflict, name, graph.name(*in_attacker)});
            } else if (live_attacker) {
                result.violations.push_back(
                    {ViolationKind::illegal_in, name, graph.name(*live_attacker)});
            }
            break;
        case Label::out:
            if (!in_attacker) {
                result.violations.push_back({ViolationKind::illegal_out, name, std::nullopt});
            }
            break;
        case Label::undec:
            if (in_attacker) {
                result.violations.push_back(
                    {ViolationKind::illegal_undec, name, graph.name(*in_attacker)});
            } else if (!live_attacker) {
                result.violations.push_back({ViolationKind::illegal_undec, name, std::nullopt});
            }
            break;
        }
    }
    if (!result.violations.empty()) {
        result.verdict = Verdict::illegal;
    } else if (labeling.count(Label::undec) == 0) {
        result.verdict = Verdict::stable;
    } else {
        result.verdict = Verdict::grounded_consistent;
    }
    result.is_grounded = result.violations.empty() && labeling == grounded_labeling(graph);
    return result;
}

// ---------------------------------------------------------------- json

nlohmann::json labeling_to_json(const AttackGraph& graph, const Labeling& labeling) {
    auto value = nlohmann::json::object();
    for (ArgIndex arg = 0; arg < graph.size(); ++arg) {
        value[graph.name(arg)] = to_string(labeling[arg]);
    }
    return value;
}

Labeling labeling_from_json(const AttackGraph& graph, const nlohmann::json& value) {
    if (!value.is_object()) {
        throw Error(ErrorCode::parse_error, "labeling must be a JSON object");
    }
    Labeling labeling(graph.size());
    std::vector<bool> seen(graph.size(), false);
    for (const auto& [id, label] : value.items()) {
        if (!label.is_string()) {
            throw Error(ErrorCode::parse_error, "label of `" + id + "` must be a string", {id});
        }
        ArgIndex arg = graph.index_of(id);
        labeling[arg] = label_from_string(label.get<std::string>());
        seen[arg] = true;
    }
    std::vector<std::string> missing;
    for (ArgIndex arg = 0; arg < graph.size(); ++arg) {
        if (!seen[arg]) {
            missing.push_back(graph.name(arg));
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::invalid_argument, "labeling is not total", missing);
    }
    return labeling;
}

} // namespace argrecon
