#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace cdslab {

/// A named tensor factor of a Hilbert space.
struct Subsystem {
    std::string name;
    std::size_t dim = 1;

    friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Ordered list of subsystems. Basis indices are row-major: the
/// last-listed subsystem varies fastest.
class Layout {
public:
    Layout() = default;
    Layout(std::initializer_list<Subsystem> parts);
    explicit Layout(std::vector<Subsystem> parts);

    std::size_t size() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }
    std::size_t total_dim() const;
    const Subsystem& operator[](std::size_t i) const { return parts_[i]; }
    auto begin() const { return parts_.begin(); }
    auto end() const { return parts_.end(); }

    bool contains(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;
    std::size_t dim_of(std::string_view name) const;
    std::vector<std::string> names() const;

    /// Sub-layout in the order given by `names`.
    Layout select(const std::vector<std::string>& names) const;
    /// Sub-layout with `names` removed, original order kept.
    Layout without(const std::vector<std::string>& names) const;
    /// Concatenation; throws LayoutError on a name collision.
    Layout concat(const Layout& other) const;
    /// Same dimensions, every name suffixed.
    Layout suffixed(std::string_view suffix) const;

    friend bool operator==(const Layout&, const Layout&) = default;

private:
    std::vector<Subsystem> parts_;
};

std::string to_string(const Layout& layout);

/// For the layout reordered as `order` (a permutation of its names), entry j
/// is the basis index in the original layout of new basis index j.
std::vector<std::size_t> reorder_indices(const Layout& layout, const std::vector<std::string>& order);

}  // namespace cdslab
