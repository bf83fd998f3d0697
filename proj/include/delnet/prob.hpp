#pragma once

// Exact finite probability: labeled spaces, distributions, kernels, joint
// models and their enumerated tables.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delnet/matrix.hpp"

namespace delnet {

/// Row sums and total masses must match 1 to this tolerance.
inline constexpr double kStructuralTol = 1e-12;
/// Tolerance for identities that accumulate roundoff over many terms.
inline constexpr double kIdentityTol = 1e-9;

/// Caps on exact enumeration. Environment overrides: DELNET_ENUM_CAP (cells)
/// and DELNET_PARTITION_CAP (alphabet size for partition search).
struct Limits {
    std::size_t max_cells = 10'000'000;
    std::size_t max_partition_symbols = 12;

    static Limits from_env();
};

struct Outcome {
    std::string space_id;
    std::size_t index = 0;
    std::string label;
};

/// A finite labeled set. Labels are unique within a space.
class Space {
public:
    Space() = default;
    Space(std::string id, std::vector<std::string> labels);

    /// Space with labels prefix0, prefix1, ...
    static Space indexed(std::string id, std::size_t n, const std::string& prefix = "");

    const std::string& id() const { return id_; }
    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<std::size_t> find(std::string_view label) const;
    std::size_t index_of(std::string_view label) const;
    Outcome outcome(std::size_t i) const;

    /// Same cardinality and labels; the id is a name, not part of the identity.
    bool same_elements(const Space& other) const { return labels_ == other.labels_; }

    bool operator==(const Space&) const = default;

private:
    std::string id_;
    std::vector<std::string> labels_;
};

/// Cartesian product, row-major over the given order. Labels join with '|'.
Space product_space(std::string id, std::span<const Space> factors);

class Distribution {
public:
    Distribution() = default;
    Distribution(Space space, std::vector<double> probs);

    static Distribution uniform(Space space);
    static Distribution point_mass(Space space, std::size_t index);

    const Space& space() const { return space_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    Space space_;
    std::vector<double> probs_;
};

/// Row-stochastic conditional distribution: row i is the law of the output
/// given input i.
class Kernel {
public:
    Kernel() = default;
    Kernel(Space from, Space to, Matrix rows);

    static Kernel identity(const Space& space);
    /// Every input maps to the same output distribution.
    static Kernel constant(const Space& from, const Distribution& out);
    /// Keeps the input with probability `fidelity`, otherwise spreads the rest
    /// uniformly over the other symbols.
    static Kernel symmetric(const Space& space, double fidelity);
    /// Deterministic map input i -> map[i].
    static Kernel deterministic(const Space& from, const Space& to, std::span<const std::size_t> map);

    const Space& from() const { return from_; }
    const Space& to() const { return to_; }
    const Matrix& matrix() const { return rows_; }
    std::span<const double> row(std::size_t i) const { return rows_.row(i); }
    double operator()(std::size_t in, std::size_t out) const { return rows_(in, out); }

    bool is_deterministic() const;

private:
    Space from_;
    Space to_;
    Matrix rows_;
};

/// Serial garbling A -> B -> C.
Kernel compose(const Kernel& first, const Kernel& second);

/// One non-label variable of a JointModel. The kernel's input is the
/// row-major product of the parents' spaces in the declared order.
struct ModelVariable {
    std::string name;
    std::vector<std::string> parents;
    Kernel kernel;
};

/// Joint law of the label and a list of signal variables, each conditioned on
/// earlier variables (the label included).
class JointModel {
public:
    JointModel(std::string label_name, Distribution prior, std::vector<ModelVariable> variables = {});

    const std::string& label_name() const { return label_name_; }
    const Distribution& prior() const { return prior_; }
    const std::vector<ModelVariable>& variables() const { return variables_; }

    /// Names in enumeration order, label first.
    std::vector<std::string> names() const;
    std::vector<Space> spaces() const;
    /// Position in names(), or nullopt.
    std::optional<std::size_t> position(std::string_view name) const;
    /// Positions in names() of variable v's parents.
    const std::vector<std::size_t>& parent_positions(std::size_t v) const { return parent_positions_[v]; }

private:
    std::string label_name_;
    Distribution prior_;
    std::vector<ModelVariable> variables_;
    std::vector<std::vector<std::size_t>> parent_positions_;
};

/// Enumerated joint table, row-major over names() in order.
class JointTable {
public:
    JointTable(std::vector<std::string> names, std::vector<Space> spaces, std::vector<double> probs);

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<Space>& spaces() const { return spaces_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t cells() const { return probs_.size(); }

    std::size_t position(std::string_view name) const;
    const Space& space(std::string_view name) const { return spaces_[position(name)]; }

    double at(std::span<const std::size_t> assignment) const;
    /// Decode a flat cell index into one index per variable.
    void decode(std::size_t cell, std::span<std::size_t> assignment) const;

private:
    std::vector<std::string> names_;
    std::vector<Space> spaces_;
    std::vector<double> probs_;
};

using Evidence = std::vector<std::pair<std::string, std::size_t>>;

/// Product of cardinalities, saturating at SIZE_MAX.
std::size_t checked_product(std::span<const std::size_t> sizes);

JointTable full_joint(const JointModel& model, const Limits& limits = {});

/// Table over `vars`, in the order given.
JointTable marginal(const JointTable& joint, std::span<const std::string> vars);

/// Law of `target` given the observed evidence, by conditioning the table.
Distribution posterior(const JointTable& joint, std::string_view target, const Evidence& evidence);

/// Same quantity computed from the model directly, enumerating only
/// evidence-consistent assignments.
Distribution posterior(const JointModel& model, std::string_view target, const Evidence& evidence,
                       const Limits& limits = {});

} // namespace delnet
