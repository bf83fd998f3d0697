#include "delnet/prob.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>

#include "delnet/errors.hpp"

namespace delnet {

namespace {

std::size_t env_size(const char* name, std::size_t fallback)
{
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0')
        return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || v == 0)
        throw InputError(std::string(name) + " must be a positive integer, got '" + raw + "'");
    return static_cast<std::size_t>(v);
}

void check_distribution(const std::string& what, std::span<const double> probs)
{
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]) || probs[i] < 0.0)
            throw InputError(what + ": entry " + std::to_string(i) + " is negative or not finite");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > kStructuralTol)
        throw InputError(what + ": entries sum to " + std::to_string(total) + ", not 1");
}

} // namespace

Limits Limits::from_env()
{
    Limits limits;
    limits.max_cells = env_size("DELNET_ENUM_CAP", limits.max_cells);
    limits.max_partition_symbols = env_size("DELNET_PARTITION_CAP", limits.max_partition_symbols);
    return limits;
}

// ---------------------------------------------------------------------------
// Space

Space::Space(std::string id, std::vector<std::string> labels) : id_(std::move(id)), labels_(std::move(labels))
{
    if (labels_.empty())
        throw InputError("space '" + id_ + "' is empty");
    std::set<std::string_view> seen;
    for (const auto& l : labels_)
        if (!seen.insert(l).second)
            throw InputError("space '" + id_ + "' has duplicate label '" + l + "'");
}

Space Space::indexed(std::string id, std::size_t n, const std::string& prefix)
{
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i)
        labels[i] = prefix + std::to_string(i);
    return Space(std::move(id), std::move(labels));
}

std::optional<std::size_t> Space::find(std::string_view label) const
{
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Space::index_of(std::string_view label) const
{
    if (auto i = find(label))
        return *i;
    throw InputError("space '" + id_ + "' has no label '" + std::string(label) + "'");
}

Outcome Space::outcome(std::size_t i) const
{
    if (i >= size())
        throw InputError("index " + std::to_string(i) + " out of range for space '" + id_ + "'");
    return {id_, i, labels_[i]};
}

Space product_space(std::string id, std::span<const Space> factors)
{
    if (factors.empty())
        return Space(std::move(id), {"()"});
    if (factors.size() == 1)
        return Space(std::move(id), factors.front().labels());
    std::vector<std::size_t> sizes;
    for (const auto& f : factors)
        sizes.push_back(f.size());
    const std::size_t total = checked_product(sizes);
    std::vector<std::string> labels;
    labels.reserve(total);
    std::vector<std::size_t> idx(factors.size(), 0);
    for (std::size_t cell = 0; cell < total; ++cell) {
        std::string label;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            if (f > 0)
                label += '|';
            label += factors[f].label(idx[f]);
        }
        labels.push_back(std::move(label));
        for (std::size_t f = factors.size(); f-- > 0;) {
            if (++idx[f] < sizes[f])
                break;
            idx[f] = 0;
        }
    }
    return Space(std::move(id), std::move(labels));
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(Space space, std::vector<double> probs) : space_(std::move(space)), probs_(std::move(probs))
{
    if (probs_.size() != space_.size())
        throw InputError("distribution over '" + space_.id() + "' has " + std::to_string(probs_.size()) +
                         " entries for " + std::to_string(space_.size()) + " outcomes");
    check_distribution("distribution over '" + space_.id() + "'", probs_);
}

Distribution Distribution::uniform(Space space)
{
    const std::size_t n = space.size();
    return Distribution(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(Space space, std::size_t index)
{
    std::vector<double> p(space.size(), 0.0);
    p.at(index) = 1.0;
    return Distribution(std::move(space), std::move(p));
}

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(Space from, Space to, Matrix rows) : from_(std::move(from)), to_(std::move(to)), rows_(std::move(rows))
{
    if (rows_.rows() != from_.size() || rows_.cols() != to_.size())
        throw InputError("kernel '" + from_.id() + "' -> '" + to_.id() + "' is " + std::to_string(rows_.rows()) +
                         "x" + std::to_string(rows_.cols()) + ", spaces need " + std::to_string(from_.size()) +
                         "x" + std::to_string(to_.size()));
    for (std::size_t r = 0; r < rows_.rows(); ++r)
        check_distribution("kernel '" + from_.id() + "' -> '" + to_.id() + "' row " + std::to_string(r),
                           rows_.row(r));
}

Kernel Kernel::identity(const Space& space)
{
    return Kernel(space, space, Matrix::identity(space.size()));
}

Kernel Kernel::constant(const Space& from, const Distribution& out)
{
    Matrix m(from.size(), out.size());
    for (std::size_t r = 0; r < from.size(); ++r)
        std::copy(out.probs().begin(), out.probs().end(), m.row(r).begin());
    return Kernel(from, out.space(), std::move(m));
}

Kernel Kernel::symmetric(const Space& space, double fidelity)
{
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw InputError("fidelity must lie in [0, 1]");
    const std::size_t n = space.size();
    if (n == 1)
        return identity(space);
    const double off = (1.0 - fidelity) / static_cast<double>(n - 1);
    Matrix m(n, n, off);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = fidelity;
    return Kernel(space, space, std::move(m));
}

Kernel Kernel::deterministic(const Space& from, const Space& to, std::span<const std::size_t> map)
{
    if (map.size() != from.size())
        throw InputError("deterministic kernel: map has " + std::to_string(map.size()) + " entries for " +
                         std::to_string(from.size()) + " inputs");
    Matrix m(from.size(), to.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] >= to.size())
            throw InputError("deterministic kernel: target " + std::to_string(map[i]) + " out of range");
        m(i, map[i]) = 1.0;
    }
    return Kernel(from, to, std::move(m));
}

bool Kernel::is_deterministic() const
{
    for (double v : rows_.data())
        if (v != 0.0 && v != 1.0)
            return false;
    return true;
}

Kernel compose(const Kernel& first, const Kernel& second)
{
    if (first.to().size() != second.from().size())
        throw InputError("compose: '" + first.to().id() + "' has " + std::to_string(first.to().size()) +
                         " outcomes but '" + second.from().id() + "' expects " +
                         std::to_string(second.from().size()));
    Matrix product = first.matrix() * second.matrix();
    // renormalize away the last-bit drift so chains of compositions stay exact to 1e-12
    for (std::size_t r = 0; r < product.rows(); ++r) {
        auto row = product.row(r);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (auto& x : row)
            x /= total;
    }
    return Kernel(first.from(), second.to(), std::move(product));
}

// ---------------------------------------------------------------------------
// JointModel

JointModel::JointModel(std::string label_name, Distribution prior, std::vector<ModelVariable> variables)
    : label_name_(std::move(label_name)), prior_(std::move(prior)), variables_(std::move(variables))
{
    std::vector<std::string> seen{label_name_};
    std::vector<std::size_t> sizes{prior_.size()};
    for (const auto& v : variables_) {
        if (std::find(seen.begin(), seen.end(), v.name) != seen.end())
            throw InputError("variable '" + v.name + "' declared twice");
        std::vector<std::size_t> positions;
        std::vector<std::size_t> parent_sizes;
        for (const auto& p : v.parents) {
            auto it = std::find(seen.begin(), seen.end(), p);
            if (it == seen.end())
                throw InputError("variable '" + v.name + "' has parent '" + p +
                                 "' that is not declared before it");
            const auto pos = static_cast<std::size_t>(it - seen.begin());
            if (std::find(positions.begin(), positions.end(), pos) != positions.end())
                throw InputError("variable '" + v.name + "' lists parent '" + p + "' twice");
            positions.push_back(pos);
            parent_sizes.push_back(sizes[pos]);
        }
        const std::size_t rows = checked_product(parent_sizes);
        if (v.kernel.from().size() != rows)
            throw InputError("variable '" + v.name + "': kernel has " + std::to_string(v.kernel.from().size()) +
                             " rows, parents need " + std::to_string(rows));
        parent_positions_.push_back(std::move(positions));
        seen.push_back(v.name);
        sizes.push_back(v.kernel.to().size());
    }
}

std::vector<std::string> JointModel::names() const
{
    std::vector<std::string> out{label_name_};
    for (const auto& v : variables_)
        out.push_back(v.name);
    return out;
}

std::vector<Space> JointModel::spaces() const
{
    std::vector<Space> out{prior_.space()};
    for (const auto& v : variables_)
        out.push_back(v.kernel.to());
    return out;
}

std::optional<std::size_t> JointModel::position(std::string_view name) const
{
    if (name == label_name_)
        return 0;
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].name == name)
            return i + 1;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// JointTable

std::size_t checked_product(std::span<const std::size_t> sizes)
{
    std::size_t total = 1;
    for (std::size_t s : sizes) {
        if (s != 0 && total > std::numeric_limits<std::size_t>::max() / s)
            return std::numeric_limits<std::size_t>::max();
        total *= s;
    }
    return total;
}

JointTable::JointTable(std::vector<std::string> names, std::vector<Space> spaces, std::vector<double> probs)
    : names_(std::move(names)), spaces_(std::move(spaces)), probs_(std::move(probs))
{
    if (names_.size() != spaces_.size() || names_.empty())
        throw InputError("joint table needs one space per variable");
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (names_[j] == names_[i])
                throw InputError("joint table repeats variable '" + names_[i] + "'");
        sizes.push_back(spaces_[i].size());
    }
    if (checked_product(sizes) != probs_.size())
        throw InputError("joint table has " + std::to_string(probs_.size()) + " cells, spaces need " +
                         std::to_string(checked_product(sizes)));
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0)
            throw InputError("joint table has a negative or non-finite cell");
        total += p;
    }
    if (std::abs(total - 1.0) > kIdentityTol)
        throw InputError("joint table mass is " + std::to_string(total) + ", not 1");
}

std::size_t JointTable::position(std::string_view name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return i;
    throw InputError("unknown variable '" + std::string(name) + "'");
}

double JointTable::at(std::span<const std::size_t> assignment) const
{
    if (assignment.size() != names_.size())
        throw InputError("assignment arity mismatch");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= spaces_[i].size())
            throw InputError("assignment index out of range for '" + names_[i] + "'");
        cell = cell * spaces_[i].size() + assignment[i];
    }
    return probs_[cell];
}

void JointTable::decode(std::size_t cell, std::span<std::size_t> assignment) const
{
    for (std::size_t i = names_.size(); i-- > 0;) {
        assignment[i] = cell % spaces_[i].size();
        cell /= spaces_[i].size();
    }
}

JointTable full_joint(const JointModel& model, const Limits& limits)
{
    const auto spaces = model.spaces();
    std::vector<std::size_t> sizes;
    for (const auto& s : spaces)
        sizes.push_back(s.size());
    const std::size_t total = checked_product(sizes);
    if (total > limits.max_cells)
        throw EnumerationLimitError("joint enumeration needs " + std::to_string(total) + " cells; cap is " +
                                        std::to_string(limits.max_cells),
                                    total, limits.max_cells);

    const auto& vars = model.variables();
    std::vector<double> probs(total, 0.0);
    std::vector<std::size_t> idx(sizes.size(), 0);
    for (std::size_t cell = 0; cell < total; ++cell) {
        double p = model.prior()[idx[0]];
        for (std::size_t v = 0; v < vars.size() && p != 0.0; ++v) {
            std::size_t row = 0;
            for (std::size_t pos : model.parent_positions(v))
                row = row * sizes[pos] + idx[pos];
            p *= vars[v].kernel(row, idx[v + 1]);
        }
        probs[cell] = p;
        for (std::size_t i = sizes.size(); i-- > 0;) {
            if (++idx[i] < sizes[i])
                break;
            idx[i] = 0;
        }
    }
    return JointTable(model.names(), spaces, std::move(probs));
}

JointTable marginal(const JointTable& joint, std::span<const std::string> vars)
{
    if (vars.empty())
        throw InputError("marginal: empty variable list");
    std::vector<std::size_t> keep;
    std::vector<Space> spaces;
    for (const auto& v : vars) {
        const std::size_t pos = joint.position(v);
        if (std::find(keep.begin(), keep.end(), pos) != keep.end())
            throw InputError("marginal: variable '" + v + "' listed twice");
        keep.push_back(pos);
        spaces.push_back(joint.spaces()[pos]);
    }
    std::vector<std::size_t> sizes;
    for (const auto& s : spaces)
        sizes.push_back(s.size());
    std::vector<double> probs(checked_product(sizes), 0.0);
    std::vector<std::size_t> assignment(joint.names().size());
    for (std::size_t cell = 0; cell < joint.cells(); ++cell) {
        const double p = joint.probs()[cell];
        if (p == 0.0)
            continue;
        joint.decode(cell, assignment);
        std::size_t out = 0;
        for (std::size_t k = 0; k < keep.size(); ++k)
            out = out * sizes[k] + assignment[keep[k]];
        probs[out] += p;
    }
    return JointTable({vars.begin(), vars.end()}, std::move(spaces), std::move(probs));
}

namespace {

Distribution normalize_or_throw(const Space& space, std::vector<double> mass, const Evidence& evidence)
{
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(total > 0.0)) {
        std::string desc;
        for (const auto& [name, value] : evidence)
            desc += (desc.empty() ? "" : ", ") + name + "=" + std::to_string(value);
        throw ConditioningError("evidence {" + desc + "} has probability zero");
    }
    for (auto& m : mass)
        m /= total;
    return Distribution(space, std::move(mass));
}

} // namespace

Distribution posterior(const JointTable& joint, std::string_view target, const Evidence& evidence)
{
    const std::size_t t = joint.position(target);
    std::vector<std::pair<std::size_t, std::size_t>> fixed;
    for (const auto& [name, value] : evidence) {
        const std::size_t pos = joint.position(name);
        if (value >= joint.spaces()[pos].size())
            throw InputError("evidence value out of range for '" + name + "'");
        fixed.emplace_back(pos, value);
    }
    std::vector<double> mass(joint.spaces()[t].size(), 0.0);
    std::vector<std::size_t> assignment(joint.names().size());
    for (std::size_t cell = 0; cell < joint.cells(); ++cell) {
        joint.decode(cell, assignment);
        bool match = true;
        for (const auto& [pos, value] : fixed)
            match = match && assignment[pos] == value;
        if (match)
            mass[assignment[t]] += joint.probs()[cell];
    }
    return normalize_or_throw(joint.spaces()[t], std::move(mass), evidence);
}

Distribution posterior(const JointModel& model, std::string_view target, const Evidence& evidence,
                       const Limits& limits)
{
    const auto spaces = model.spaces();
    const auto target_pos = model.position(target);
    if (!target_pos)
        throw InputError("unknown variable '" + std::string(target) + "'");
    std::vector<std::optional<std::size_t>> observed(spaces.size());
    for (const auto& [name, value] : evidence) {
        const auto pos = model.position(name);
        if (!pos)
            throw InputError("unknown variable '" + name + "'");
        if (value >= spaces[*pos].size())
            throw InputError("evidence value out of range for '" + name + "'");
        if (observed[*pos] && *observed[*pos] != value)
            return normalize_or_throw(spaces[*target_pos], std::vector<double>(spaces[*target_pos].size(), 0.0),
                                      evidence);
        observed[*pos] = value;
    }
    std::vector<std::size_t> free_sizes;
    for (std::size_t i = 0; i < spaces.size(); ++i)
        if (!observed[i])
            free_sizes.push_back(spaces[i].size());
    const std::size_t work = checked_product(free_sizes);
    if (work > limits.max_cells)
        throw EnumerationLimitError("posterior enumeration needs " + std::to_string(work) + " cells; cap is " +
                                        std::to_string(limits.max_cells),
                                    work, limits.max_cells);

    // depth-first over variables in model order, pruning zero-probability prefixes
    std::vector<double> mass(spaces[*target_pos].size(), 0.0);
    std::vector<std::size_t> idx(spaces.size(), 0);
    const auto& vars = model.variables();
    auto factor = [&](std::size_t pos) {
        if (pos == 0)
            return model.prior()[idx[0]];
        std::size_t row = 0;
        for (std::size_t pp : model.parent_positions(pos - 1))
            row = row * spaces[pp].size() + idx[pp];
        return vars[pos - 1].kernel(row, idx[pos]);
    };
    auto visit = [&](auto&& self, std::size_t pos, double p) -> void {
        if (pos == spaces.size()) {
            mass[idx[*target_pos]] += p;
            return;
        }
        const std::size_t lo = observed[pos] ? *observed[pos] : 0;
        const std::size_t hi = observed[pos] ? *observed[pos] + 1 : spaces[pos].size();
        for (std::size_t v = lo; v < hi; ++v) {
            idx[pos] = v;
            const double q = p * factor(pos);
            if (q != 0.0)
                self(self, pos + 1, q);
        }
    };
    visit(visit, 0, 1.0);
    return normalize_or_throw(spaces[*target_pos], std::move(mass), evidence);
}

} // namespace delnet
