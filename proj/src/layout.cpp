#include "cdslab/layout.hpp"

#include <algorithm>
#include <set>

#include "cdslab/error.hpp"

namespace cdslab {

Layout::Layout(std::initializer_list<Subsystem> parts) : Layout(std::vector<Subsystem>(parts)) {}

Layout::Layout(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
    std::set<std::string_view> seen;
    for (const auto& p : parts_) {
        if (p.dim == 0) {
            throw LayoutError("subsystem '" + p.name + "' has dimension 0");
        }
        if (!seen.insert(p.name).second) {
            throw LayoutError("duplicate subsystem name '" + p.name + "'");
        }
    }
}

std::size_t Layout::total_dim() const {
    std::size_t d = 1;
    for (const auto& p : parts_) {
        d *= p.dim;
    }
    return d;
}

bool Layout::contains(std::string_view name) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const Subsystem& p) { return p.name == name; });
}

std::size_t Layout::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i].name == name) {
            return i;
        }
    }
    throw LayoutError("no subsystem named '" + std::string(name) + "' in " + to_string(*this));
}

std::size_t Layout::dim_of(std::string_view name) const { return parts_[index_of(name)].dim; }

std::vector<std::string> Layout::names() const {
    std::vector<std::string> out;
    out.reserve(parts_.size());
    for (const auto& p : parts_) {
        out.push_back(p.name);
    }
    return out;
}

Layout Layout::select(const std::vector<std::string>& names) const {
    std::vector<Subsystem> out;
    out.reserve(names.size());
    for (const auto& n : names) {
        out.push_back(parts_[index_of(n)]);
    }
    return Layout(std::move(out));
}

Layout Layout::without(const std::vector<std::string>& names) const {
    for (const auto& n : names) {
        (void)index_of(n);
    }
    std::vector<Subsystem> out;
    for (const auto& p : parts_) {
        if (std::find(names.begin(), names.end(), p.name) == names.end()) {
            out.push_back(p);
        }
    }
    return Layout(std::move(out));
}

Layout Layout::concat(const Layout& other) const {
    std::vector<Subsystem> out = parts_;
    out.insert(out.end(), other.parts_.begin(), other.parts_.end());
    return Layout(std::move(out));
}

Layout Layout::suffixed(std::string_view suffix) const {
    std::vector<Subsystem> out = parts_;
    for (auto& p : out) {
        p.name += suffix;
    }
    return Layout(std::move(out));
}

std::string to_string(const Layout& layout) {
    std::string s = "(";
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (i) s += ", ";
        s += layout[i].name + ":" + std::to_string(layout[i].dim);
    }
    return s + ")";
}

std::vector<std::size_t> reorder_indices(const Layout& layout, const std::vector<std::string>& order) {
    if (order.size() != layout.size()) {
        throw LayoutError("reorder must name every subsystem of " + to_string(layout));
    }
    const std::size_t k = layout.size();
    // Stride of each original subsystem.
    std::vector<std::size_t> stride(k, 1);
    for (std::size_t i = k; i-- > 1;) {
        stride[i - 1] = stride[i] * layout[i].dim;
    }
    std::vector<std::size_t> src(k);
    std::vector<std::size_t> dims(k);
    for (std::size_t j = 0; j < k; ++j) {
        src[j] = layout.index_of(order[j]);
        dims[j] = layout[src[j]].dim;
    }
    {
        auto sorted = src;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw LayoutError("reorder names a subsystem twice");
        }
    }
    const std::size_t total = layout.total_dim();
    std::vector<std::size_t> out(total);
    std::vector<std::size_t> digit(k, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::size_t old = 0;
        for (std::size_t j = 0; j < k; ++j) {
            old += digit[j] * stride[src[j]];
        }
        out[n] = old;
        for (std::size_t j = k; j-- > 0;) {
            if (++digit[j] < dims[j]) break;
            digit[j] = 0;
        }
    }
    return out;
}

}  // namespace cdslab
