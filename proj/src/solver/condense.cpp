#include "sdg/solver/solver.hpp"

#include <Eigen/LU>

#include <numeric>

namespace sdg::solver {

namespace {

constexpr int kMaxBlock = 256;

int find_root(std::vector<int>& parent, int i)
{
    while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
    }
    return i;
}

}  // namespace

Eigen::VectorXd solve_condensed(const SpMat& a, const Eigen::VectorXd& b, const std::vector<char>& eliminate,
                                const LinearContract& contract, LinearStats* stats)
{
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.size() != n || static_cast<int>(eliminate.size()) != n) {
        throw InvalidArgument("solve_condensed: size mismatch");
    }
    // local[i] = position within E (>= 0) or -(position within R) - 1.
    std::vector<int> local(static_cast<std::size_t>(n));
    std::vector<int> e_ids, r_ids;
    for (int i = 0; i < n; ++i) {
        if (eliminate[static_cast<std::size_t>(i)]) {
            local[static_cast<std::size_t>(i)] = static_cast<int>(e_ids.size());
            e_ids.push_back(i);
        } else {
            local[static_cast<std::size_t>(i)] = -static_cast<int>(r_ids.size()) - 1;
            r_ids.push_back(i);
        }
    }
    const int ne = static_cast<int>(e_ids.size());
    const int nr = static_cast<int>(r_ids.size());
    if (ne == 0) return linear_solve(a, b, contract, stats);

    std::vector<Eigen::Triplet<double>> t_rr, t_re, t_er;
    std::vector<std::vector<std::pair<int, double>>> ee_rows(static_cast<std::size_t>(ne));
    std::vector<int> parent(static_cast<std::size_t>(ne));
    std::iota(parent.begin(), parent.end(), 0);
    for (int o = 0; o < a.outerSize(); ++o) {
        for (SpMat::InnerIterator it(a, o); it; ++it) {
            const int li = local[static_cast<std::size_t>(it.row())];
            const int lj = local[static_cast<std::size_t>(it.col())];
            if (li >= 0 && lj >= 0) {
                ee_rows[static_cast<std::size_t>(li)].emplace_back(lj, it.value());
                const int ri = find_root(parent, li), rj = find_root(parent, lj);
                if (ri != rj) parent[static_cast<std::size_t>(ri)] = rj;
            } else if (li >= 0) {
                t_er.emplace_back(li, -lj - 1, it.value());
            } else if (lj >= 0) {
                t_re.emplace_back(-li - 1, lj, it.value());
            } else {
                t_rr.emplace_back(-li - 1, -lj - 1, it.value());
            }
        }
    }

    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of(static_cast<std::size_t>(ne), -1);
    for (int i = 0; i < ne; ++i) {
        const int r = find_root(parent, i);
        if (block_of[static_cast<std::size_t>(r)] < 0) {
            block_of[static_cast<std::size_t>(r)] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(r)])].push_back(i);
    }
    std::vector<Eigen::Triplet<double>> t_inv;
    std::vector<int> slot(static_cast<std::size_t>(ne), -1);
    for (const auto& blk : blocks) {
        const int m = static_cast<int>(blk.size());
        if (m > kMaxBlock) {
            throw InvalidArgument("solve_condensed: eliminated block of size " + std::to_string(m) + " exceeds " +
                                  std::to_string(kMaxBlock));
        }
        for (int k = 0; k < m; ++k) slot[static_cast<std::size_t>(blk[static_cast<std::size_t>(k)])] = k;
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) {
            for (const auto& [j, v] : ee_rows[static_cast<std::size_t>(blk[static_cast<std::size_t>(k)])]) {
                d(k, slot[static_cast<std::size_t>(j)]) += v;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
        lu.setThreshold(1e-13);
        if (!lu.isInvertible()) throw FactorizationError("solve_condensed: singular local block");
        const Eigen::MatrixXd inv = lu.inverse();
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                if (inv(r, c) != 0.0) {
                    t_inv.emplace_back(blk[static_cast<std::size_t>(r)], blk[static_cast<std::size_t>(c)], inv(r, c));
                }
            }
        }
    }

    SpMat a_rr(nr, nr), a_re(nr, ne), a_er(ne, nr), d_inv(ne, ne);
    a_rr.setFromTriplets(t_rr.begin(), t_rr.end());
    a_re.setFromTriplets(t_re.begin(), t_re.end());
    a_er.setFromTriplets(t_er.begin(), t_er.end());
    d_inv.setFromTriplets(t_inv.begin(), t_inv.end());

    Eigen::VectorXd b_r(nr), b_e(ne);
    for (int i = 0; i < nr; ++i) b_r(i) = b(r_ids[static_cast<std::size_t>(i)]);
    for (int i = 0; i < ne; ++i) b_e(i) = b(e_ids[static_cast<std::size_t>(i)]);

    const SpMat d_er = (d_inv * a_er).pruned();
    const SpMat schur = (a_rr - a_re * d_er).pruned();
    const Eigen::VectorXd g = b_r - a_re * (d_inv * b_e);
    LinearStats st;
    const Eigen::VectorXd x_r = linear_solve(schur, g, contract, &st);
    const Eigen::VectorXd x_e = d_inv * b_e - d_er * x_r;

    Eigen::VectorXd x(n);
    for (int i = 0; i < nr; ++i) x(r_ids[static_cast<std::size_t>(i)]) = x_r(i);
    for (int i = 0; i < ne; ++i) x(e_ids[static_cast<std::size_t>(i)]) = x_e(i);
    const double nb = b.norm();
    st.rel_residual = (a * x - b).norm() / (nb > 0.0 ? nb : 1.0);
    if (stats != nullptr) *stats = st;
    return x;
}

}  // namespace sdg::solver
