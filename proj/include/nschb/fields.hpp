#pragma once
// Field storage on the MAC grid. Fields are value types; operations on them
// are pure functions (see operators.hpp), so sharing across threads is safe
// as long as nobody mutates a shared instance.
//
// Ghost convention (one layer, implicit):
//   HomogeneousNeumann  : mirror,      f(-1,j) =  f(0,j)
//   HomogeneousDirichlet: anti-mirror, f(-1,j) = -f(0,j)
// Velocity is no-slip: normal components are stored on boundary faces and
// pinned to zero; tangential ghosts anti-mirror.

#include <cassert>
#include <vector>

#include "nschb/grid.hpp"

namespace nschb {

enum class ScalarBC { HomogeneousNeumann, HomogeneousDirichlet };

class ScalarField {
  public:
    ScalarField() = default;
    ScalarField(const Grid& g, ScalarBC bc, double fill = 0.0)
        : grid_(g), bc_(bc), v_(static_cast<std::size_t>(g.cells()), fill) {}

    const Grid& grid() const { return grid_; }
    ScalarBC bc() const { return bc_; }
    void set_bc(ScalarBC bc) { bc_ = bc; }

    double& operator()(int i, int j) { return v_[grid_.cidx(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_.cidx(i, j)]; }

    // ghost-aware access, valid one cell beyond the domain
    double at(int i, int j) const {
        const int nx = grid_.nx, ny = grid_.ny;
        double s = 1.0;
        if (i < 0) { i = 0; s *= sign(); }
        else if (i >= nx) { i = nx - 1; s *= sign(); }
        if (j < 0) { j = 0; s *= sign(); }
        else if (j >= ny) { j = ny - 1; s *= sign(); }
        return s * v_[grid_.cidx(i, j)];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

  private:
    double sign() const { return bc_ == ScalarBC::HomogeneousNeumann ? 1.0 : -1.0; }

    Grid grid_;
    ScalarBC bc_ = ScalarBC::HomogeneousNeumann;
    std::vector<double> v_;
};

// Face-centered velocity, no-slip walls.
class MACVectorField {
  public:
    MACVectorField() = default;
    explicit MACVectorField(const Grid& g)
        : grid_(g),
          ux_(static_cast<std::size_t>(g.xfaces()), 0.0),
          uy_(static_cast<std::size_t>(g.yfaces()), 0.0) {}

    const Grid& grid() const { return grid_; }

    double& ux(int i, int j) { return ux_[grid_.uxidx(i, j)]; }
    double ux(int i, int j) const { return ux_[grid_.uxidx(i, j)]; }
    double& uy(int i, int j) { return uy_[grid_.uyidx(i, j)]; }
    double uy(int i, int j) const { return uy_[grid_.uyidx(i, j)]; }

    // tangential ghost access (anti-mirror across the wall)
    double ux_at(int i, int j) const {
        if (j < 0) return -ux_[grid_.uxidx(i, 0)];
        if (j >= grid_.ny) return -ux_[grid_.uxidx(i, grid_.ny - 1)];
        return ux_[grid_.uxidx(i, j)];
    }
    double uy_at(int i, int j) const {
        if (i < 0) return -uy_[grid_.uyidx(0, j)];
        if (i >= grid_.nx) return -uy_[grid_.uyidx(grid_.nx - 1, j)];
        return uy_[grid_.uyidx(i, j)];
    }

    // pin normal components on the walls to zero
    void apply_noslip() {
        for (int j = 0; j < grid_.ny; ++j) {
            ux_[grid_.uxidx(0, j)] = 0.0;
            ux_[grid_.uxidx(grid_.nx, j)] = 0.0;
        }
        for (int i = 0; i < grid_.nx; ++i) {
            uy_[grid_.uyidx(i, 0)] = 0.0;
            uy_[grid_.uyidx(i, grid_.ny)] = 0.0;
        }
    }

    double* ux_data() { return ux_.data(); }
    const double* ux_data() const { return ux_.data(); }
    double* uy_data() { return uy_.data(); }
    const double* uy_data() const { return uy_.data(); }

  private:
    Grid grid_;
    std::vector<double> ux_, uy_;
};

// Rank-2 tensor with diagonal entries at cell centers and off-diagonal
// entries at nodes (the natural MAC staggering for grad(u) and phi-stress).
class TensorField {
  public:
    TensorField() = default;
    explicit TensorField(const Grid& g)
        : grid_(g),
          xx_(static_cast<std::size_t>(g.cells()), 0.0),
          yy_(static_cast<std::size_t>(g.cells()), 0.0),
          xy_(static_cast<std::size_t>(g.nodes()), 0.0),
          yx_(static_cast<std::size_t>(g.nodes()), 0.0) {}

    const Grid& grid() const { return grid_; }

    double& xx(int i, int j) { return xx_[grid_.cidx(i, j)]; }
    double xx(int i, int j) const { return xx_[grid_.cidx(i, j)]; }
    double& yy(int i, int j) { return yy_[grid_.cidx(i, j)]; }
    double yy(int i, int j) const { return yy_[grid_.cidx(i, j)]; }
    double& xy(int i, int j) { return xy_[grid_.nidx(i, j)]; }
    double xy(int i, int j) const { return xy_[grid_.nidx(i, j)]; }
    double& yx(int i, int j) { return yx_[grid_.nidx(i, j)]; }
    double yx(int i, int j) const { return yx_[grid_.nidx(i, j)]; }

  private:
    Grid grid_;
    std::vector<double> xx_, yy_, xy_, yx_;
};

}  // namespace nschb
