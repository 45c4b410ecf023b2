#pragma once
// Tensor-product eigendecomposition of (alpha - beta*Laplacian) on the MAC
// layouts. The 1D second-difference operators with mirror, anti-mirror, or
// fixed-endpoint closure have closed-form cosine/sine eigenbases, so the 2D
// constant-coefficient problem factors into four dense 1D transforms plus a
// pointwise symbol division. Used as a direct solver for constant-coefficient
// problems and as the preconditioner for variable-coefficient ones.

#include <functional>
#include <memory>
#include <vector>

#include "nschb/fields.hpp"

namespace nschb {

enum class Basis1DKind {
    CellNeumann,    // n cells, mirror ghosts:      cos(k pi (i+1/2)/n)
    CellDirichlet,  // n cells, anti-mirror ghosts: sin((k+1) pi (i+1/2)/n)
    FaceInterior    // n-1 interior faces, fixed boundary faces: sin(k pi i/n)
};

struct Basis1D {
    int npts = 0;              // number of points the basis acts on
    std::vector<double> Q;     // npts x npts, Q[i*npts + k] = k-th eigenvector at point i
    std::vector<double> lam;   // eigenvalues of -d^2/dx^2 (scaled by 1/h^2), ascending-compatible

    static Basis1D make(Basis1DKind kind, int n, double h);
};

// 2D solver for (alpha - beta * Laplacian) x = b on an (nx_pts x ny_pts)
// row-major array whose x/y closures match the chosen bases.
class FastDiag2D {
  public:
    FastDiag2D(Basis1DKind kx, int nx_cells, double dx, Basis1DKind ky, int ny_cells, double dy);

    int nx() const { return bx_.npts; }
    int ny() const { return by_.npts; }

    // Solves in place. For the singular alpha = 0 Neumann x Neumann case the
    // zero mode is dropped (mean-zero solution; the rhs must be compatible).
    void solve(double alpha, double beta, double* data) const;

    // Anisotropic symbol (alpha + bx*lamx + by*lamy), in place; used by the
    // velocity-block preconditioners.
    void solve_anisotropic(double alpha, double beta_x, double beta_y, double* data) const;

    // General symbol division: data_hat /= symbol(lamx, lamy). Zero symbols
    // drop the mode. Backs the biharmonic-type preconditioners.
    void solve_with(double* data, const std::function<double(double, double)>& symbol) const;

  private:
    Basis1D bx_, by_;
};

// Cached per-grid solvers for the common cell-centered cases.
const FastDiag2D& cell_solver(const Grid& g, ScalarBC bc);

}  // namespace nschb
