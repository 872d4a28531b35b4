#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/params.hpp"

namespace nldiff {

/// Uniform cell-centred grid on the ball [0, R] in radius, with the
/// d-dimensional measure folded into face areas r^{d-1} and cell volumes
/// (r_{i+1}^d - r_i^d)/d.  The unit-sphere factor is applied by `mass`.
class RadialGrid {
public:
    RadialGrid(std::size_t cells, double outer_radius, int dim)
        : cells_(cells), radius_(outer_radius), dim_(dim) {
        if (cells_ < 2) throw DomainError("grid needs at least two cells");
        if (!(outer_radius > 0.0) || !std::isfinite(outer_radius))
            throw DomainError("outer radius must be positive");
        if (dim_ < 1) throw DomainError("dimension must be >= 1");
        dr_ = radius_ / static_cast<double>(cells_);
        centers_.resize(cells_);
        volumes_.resize(cells_);
        areas_.resize(cells_ + 1);
        for (std::size_t j = 0; j <= cells_; ++j) areas_[j] = std::pow(face(j), dim_ - 1);
        for (std::size_t i = 0; i < cells_; ++i) {
            centers_[i] = (static_cast<double>(i) + 0.5) * dr_;
            volumes_[i] = (std::pow(face(i + 1), dim_) - std::pow(face(i), dim_)) / dim_;
        }
        // r^0 at r = 0 would give area 1 in d = 1; the symmetry face carries no flux anyway.
        omega_ = unit_sphere_area(dim_);
    }

    std::size_t size() const noexcept { return cells_; }
    double outer_radius() const noexcept { return radius_; }
    double spacing() const noexcept { return dr_; }
    int dim() const noexcept { return dim_; }

    double center(std::size_t i) const { return centers_[i]; }
    double face(std::size_t j) const { return static_cast<double>(j) * dr_; }
    double face_area(std::size_t j) const { return areas_[j]; }
    double volume(std::size_t i) const { return volumes_[i]; }
    double sphere_area() const noexcept { return omega_; }

    std::span<const double> centers() const noexcept { return centers_; }
    std::span<const double> volumes() const noexcept { return volumes_; }
    std::span<const double> face_areas() const noexcept { return areas_; }

    /// Same dimension and cell count, different outer radius.
    RadialGrid rescaled(double factor) const { return {cells_, radius_ * factor, dim_}; }

    bool operator==(const RadialGrid& o) const noexcept {
        return cells_ == o.cells_ && radius_ == o.radius_ && dim_ == o.dim_;
    }

private:
    std::size_t cells_;
    double radius_;
    int dim_;
    double dr_ = 0.0;
    double omega_ = 0.0;
    std::vector<double> centers_;
    std::vector<double> volumes_;
    std::vector<double> areas_;
};

/// Radially symmetric density sampled at cell centres at time t.
struct RadialField {
    RadialGrid grid;
    std::vector<double> values;
    double time = 0.0;

    RadialField(RadialGrid g, std::vector<double> v, double t)
        : grid(std::move(g)), values(std::move(v)), time(t) {
        if (values.size() != grid.size()) throw DomainError("field size does not match grid");
    }

    template <class F>
    static RadialField sample(const RadialGrid& g, double t, F&& density) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = density(g.center(i));
        return {g, std::move(v), t};
    }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    double mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * grid.volume(i);
        return grid.sphere_area() * m;
    }

    double max() const { return *std::max_element(values.begin(), values.end()); }

    /// Piecewise linear interpolation between cell centres; constant
    /// extension inside the first half cell and beyond the last centre.
    double interpolate(double r) const {
        const double dr = grid.spacing();
        const double s = r / dr - 0.5;
        if (s <= 0.0) return values.front();
        const auto i = static_cast<std::size_t>(s);
        if (i + 1 >= values.size()) return values.back();
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
};

/// L1 distance between two fields on the same grid, in the d-dimensional measure.
inline double l1_distance(const RadialField& a, const RadialField& b) {
    if (!(a.grid == b.grid)) throw DomainError("l1_distance needs matching grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]) * a.grid.volume(i);
    return a.grid.sphere_area() * s;
}

}  // namespace nldiff
