#include "sdg/femspace/polynomial.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

namespace sdg::fem {

void monomials(int k, const Vec2& xi, double* val, double* dx, double* dy)
{
    double px[16], py[16];
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= k; ++i) {
        px[i] = px[i - 1] * xi.x();
        py[i] = py[i - 1] * xi.y();
    }
    int idx = 0;
    for (int d = 0; d <= k; ++d) {
        for (int a = d; a >= 0; --a) {
            const int b = d - a;
            val[idx] = px[a] * py[b];
            if (dx) dx[idx] = a > 0 ? a * px[a - 1] * py[b] : 0.0;
            if (dy) dy[idx] = b > 0 ? b * px[a] * py[b - 1] : 0.0;
            ++idx;
        }
    }
}

namespace {

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Eigen::MatrixXd build_modal(int k)
{
    const int n = poly_dim(k);
    std::vector<std::array<int, 2>> pw;
    for (int d = 0; d <= k; ++d) {
        for (int a = d; a >= 0; --a) pw.push_back({a, d - a});
    }
    // Exact reference moments: int x^a y^b = a! b! / (a + b + 2)!.
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int a = pw[static_cast<std::size_t>(i)][0] + pw[static_cast<std::size_t>(j)][0];
            const int b = pw[static_cast<std::size_t>(i)][1] + pw[static_cast<std::size_t>(j)][1];
            gram(i, j) = factorial(a) * factorial(b) / factorial(a + b + 2);
        }
    }
    // Gram = L L^T; rows of L^{-1} are graded orthonormal polynomials.
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    const Eigen::MatrixXd l = llt.matrixL();
    return l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

const Eigen::MatrixXd& reference_modal(int k)
{
    if (k < 0 || k > 6) throw InvalidArgument("reference_modal: degree out of range");
    static std::array<Eigen::MatrixXd, 7> cache;
    static std::array<std::once_flag, 7> flags;
    std::call_once(flags[static_cast<std::size_t>(k)], [k] { cache[static_cast<std::size_t>(k)] = build_modal(k); });
    return cache[static_cast<std::size_t>(k)];
}

double legendre01(int m, double s)
{
    const double t = 2.0 * s - 1.0;
    double p0 = 1.0, p1 = t;
    if (m == 0) return 1.0;
    for (int n = 1; n < m; ++n) {
        const double p2 = ((2.0 * n + 1.0) * t * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * m + 1.0) * p1;
}

void PolySet::eval(const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::MatrixXd* gx, Eigen::MatrixXd* gy) const
{
    const int nm = poly_dim(k);
    const int nq = static_cast<int>(pts.size());
    Eigen::MatrixXd mv(nq, nm), mx(nq, nm), my(nq, nm);
    std::vector<double> v(static_cast<std::size_t>(nm)), dx(static_cast<std::size_t>(nm)), dy(static_cast<std::size_t>(nm));
    for (int q = 0; q < nq; ++q) {
        monomials(k, frame.local(pts[static_cast<std::size_t>(q)]), v.data(), dx.data(), dy.data());
        for (int a = 0; a < nm; ++a) {
            mv(q, a) = v[static_cast<std::size_t>(a)];
            mx(q, a) = dx[static_cast<std::size_t>(a)];
            my(q, a) = dy[static_cast<std::size_t>(a)];
        }
    }
    val.noalias() = mv * coef.transpose();
    if (gx || gy) {
        const Eigen::MatrixXd dxi = mx * coef.transpose();
        const Eigen::MatrixXd deta = my * coef.transpose();
        // d/dx = inv(0,0) d/dxi + inv(1,0) d/deta
        if (gx) *gx = frame.inv(0, 0) * dxi + frame.inv(1, 0) * deta;
        if (gy) *gy = frame.inv(0, 1) * dxi + frame.inv(1, 1) * deta;
    }
}

}  // namespace sdg::fem
