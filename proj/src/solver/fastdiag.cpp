#include "nschb/fastdiag.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "nschb/kernels.hpp"

namespace nschb {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Y (rows x n) = X (rows x n) * Q (n x n), rank-1 accumulation
void mul_right(const double* X, const double* Q, double* Y, int rows, int n) {
    const auto& k = kern::kernels();
    std::memset(Y, 0, static_cast<std::size_t>(rows) * n * sizeof(double));
    for (int r = 0; r < rows; ++r) {
        const double* xr = X + static_cast<std::size_t>(r) * n;
        double* yr = Y + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i) k.axpy(xr[i], Q + static_cast<std::size_t>(i) * n, yr, n);
    }
}

// Y (rows x n) = X (rows x n) * Q^T
void mul_right_T(const double* X, const double* Q, double* Y, int rows, int n) {
    const auto& k = kern::kernels();
    for (int r = 0; r < rows; ++r) {
        const double* xr = X + static_cast<std::size_t>(r) * n;
        double* yr = Y + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i) yr[i] = k.dot(xr, Q + static_cast<std::size_t>(i) * n, n);
    }
}

// Y (m x cols) = Q^T (m x m) * X (m x cols)
void mul_left_T(const double* Q, const double* X, double* Y, int m, int cols) {
    const auto& k = kern::kernels();
    std::memset(Y, 0, static_cast<std::size_t>(m) * cols * sizeof(double));
    for (int j = 0; j < m; ++j) {
        const double* xr = X + static_cast<std::size_t>(j) * cols;
        const double* qr = Q + static_cast<std::size_t>(j) * m;
        for (int t = 0; t < m; ++t) k.axpy(qr[t], xr, Y + static_cast<std::size_t>(t) * cols, cols);
    }
}

// Y (m x cols) = Q (m x m) * X (m x cols)
void mul_left(const double* Q, const double* X, double* Y, int m, int cols) {
    const auto& k = kern::kernels();
    std::memset(Y, 0, static_cast<std::size_t>(m) * cols * sizeof(double));
    for (int j = 0; j < m; ++j) {
        const double* qr = Q + static_cast<std::size_t>(j) * m;
        double* yr = Y + static_cast<std::size_t>(j) * cols;
        for (int t = 0; t < m; ++t) k.axpy(qr[t], X + static_cast<std::size_t>(t) * cols, yr, cols);
    }
}

}  // namespace

Basis1D Basis1D::make(Basis1DKind kind, int n, double h) {
    Basis1D b;
    const double ih2 = 1.0 / (h * h);
    switch (kind) {
        case Basis1DKind::CellNeumann: {
            b.npts = n;
            b.Q.resize(static_cast<std::size_t>(n) * n);
            b.lam.resize(n);
            for (int k = 0; k < n; ++k) {
                double c = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
                for (int i = 0; i < n; ++i)
                    b.Q[static_cast<std::size_t>(i) * n + k] =
                        c * std::cos(k * kPi * (i + 0.5) / n);
                b.lam[k] = (2.0 - 2.0 * std::cos(k * kPi / n)) * ih2;
            }
            break;
        }
        case Basis1DKind::CellDirichlet: {
            b.npts = n;
            b.Q.resize(static_cast<std::size_t>(n) * n);
            b.lam.resize(n);
            for (int k = 0; k < n; ++k) {
                int kk = k + 1;
                double c = (kk == n) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
                for (int i = 0; i < n; ++i)
                    b.Q[static_cast<std::size_t>(i) * n + k] =
                        c * std::sin(kk * kPi * (i + 0.5) / n);
                b.lam[k] = (2.0 - 2.0 * std::cos(kk * kPi / n)) * ih2;
            }
            break;
        }
        case Basis1DKind::FaceInterior: {
            int m = n - 1;
            b.npts = m;
            b.Q.resize(static_cast<std::size_t>(m) * m);
            b.lam.resize(m);
            for (int k = 0; k < m; ++k) {
                int kk = k + 1;
                double c = std::sqrt(2.0 / n);
                for (int i = 0; i < m; ++i)
                    b.Q[static_cast<std::size_t>(i) * m + k] =
                        c * std::sin(kk * kPi * (i + 1) / static_cast<double>(n));
                b.lam[k] = (2.0 - 2.0 * std::cos(kk * kPi / n)) * ih2;
            }
            break;
        }
    }
    return b;
}

FastDiag2D::FastDiag2D(Basis1DKind kx, int nx_cells, double dx, Basis1DKind ky, int ny_cells,
                       double dy)
    : bx_(Basis1D::make(kx, nx_cells, dx)), by_(Basis1D::make(ky, ny_cells, dy)) {}

void FastDiag2D::solve_with(double* data,
                            const std::function<double(double, double)>& symbol) const {
    const int nx = bx_.npts, ny = by_.npts;
    std::vector<double> t1(static_cast<std::size_t>(nx) * ny);
    std::vector<double> t2(static_cast<std::size_t>(nx) * ny);

    // hat = Qy^T * (X * Qx)
    mul_right(data, bx_.Q.data(), t1.data(), ny, nx);
    mul_left_T(by_.Q.data(), t1.data(), t2.data(), ny, nx);

    for (int m = 0; m < ny; ++m)
        for (int k = 0; k < nx; ++k) {
            double s = symbol(bx_.lam[k], by_.lam[m]);
            double& c = t2[static_cast<std::size_t>(m) * nx + k];
            if (s != 0.0) c /= s;
            else c = 0.0;  // singular Neumann zero mode: mean-zero solution
        }

    // X = Qy * hat * Qx^T
    mul_left(by_.Q.data(), t2.data(), t1.data(), ny, nx);
    mul_right_T(t1.data(), bx_.Q.data(), data, ny, nx);
}

void FastDiag2D::solve_anisotropic(double alpha, double beta_x, double beta_y,
                                   double* data) const {
    solve_with(data, [&](double lx, double ly) { return alpha + beta_x * lx + beta_y * ly; });
}

void FastDiag2D::solve(double alpha, double beta, double* data) const {
    solve_anisotropic(alpha, beta, beta, data);
}

const FastDiag2D& cell_solver(const Grid& g, ScalarBC bc) {
    struct Key {
        int nx, ny;
        double lx, ly;
        int bc;
        bool operator<(const Key& o) const {
            if (nx != o.nx) return nx < o.nx;
            if (ny != o.ny) return ny < o.ny;
            if (lx != o.lx) return lx < o.lx;
            if (ly != o.ly) return ly < o.ly;
            return bc < o.bc;
        }
    };
    static std::map<Key, std::unique_ptr<FastDiag2D>> cache;
    static std::mutex mu;
    Key key{g.nx, g.ny, g.lx, g.ly, static_cast<int>(bc)};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        Basis1DKind k = bc == ScalarBC::HomogeneousNeumann ? Basis1DKind::CellNeumann
                                                           : Basis1DKind::CellDirichlet;
        it = cache
                 .emplace(key, std::make_unique<FastDiag2D>(k, g.nx, g.dx, k, g.ny, g.dy))
                 .first;
    }
    return *it->second;
}

}  // namespace nschb
