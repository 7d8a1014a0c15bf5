// SPDX-License-Identifier: Apache-2.0

#include "rsma/qp_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ActiveConstraint {
    bool equality;
    int index;
};

class ActiveSet {
public:
    ActiveSet(const Eigen::LLT<Eigen::MatrixXd>& llt, Eigen::Index n) : llt_(llt), n_(n) {}

    void add(const ActiveConstraint& c, const Eigen::VectorXd& normal) {
        items_.push_back(c);
        normals_.push_back(normal);
        refactor();
    }

    void remove(std::size_t pos) {
        items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(pos));
        normals_.erase(normals_.begin() + static_cast<std::ptrdiff_t>(pos));
        refactor();
    }

    // z = H np (primal step), r = N* np (change in active multipliers).
    void directions(const Eigen::VectorXd& np, Eigen::VectorXd& z, Eigen::VectorXd& r) const {
        const Eigen::VectorXd d = llt_.matrixL().solve(np);
        const Eigen::Index q = size();
        if (q == 0) {
            z = llt_.matrixU().solve(d);
            r.resize(0);
            return;
        }
        const Eigen::VectorXd qd = q_.transpose() * d;
        Eigen::VectorXd tail = Eigen::VectorXd::Zero(n_);
        if (q < n_) tail = q_.rightCols(n_ - q) * qd.tail(n_ - q);
        z = llt_.matrixU().solve(tail);
        r = r_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(qd.head(q));
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(items_.size()); }
    const std::vector<ActiveConstraint>& items() const { return items_; }

private:
    void refactor() {
        const Eigen::Index q = size();
        if (q == 0) return;
        Eigen::MatrixXd b(n_, q);
        for (Eigen::Index j = 0; j < q; ++j) b.col(j) = llt_.matrixL().solve(normals_[static_cast<std::size_t>(j)]);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
        q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n_, n_);
        r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    }

    const Eigen::LLT<Eigen::MatrixXd>& llt_;
    Eigen::Index n_;
    std::vector<ActiveConstraint> items_;
    std::vector<Eigen::VectorXd> normals_;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd r_;
};

}  // namespace

QpSolution solve_qp(const QpProblem& p) {
    const Eigen::Index n = p.G.rows();
    if (n == 0 || p.G.cols() != n || p.a.size() != n) throw DomainError("solve_qp: G must be square and match a");
    const Eigen::Index me = p.Ce.cols();
    const Eigen::Index mi = p.Ci.cols();
    if ((me > 0 && p.Ce.rows() != n) || p.ce.size() != me || (mi > 0 && p.Ci.rows() != n) || p.ci.size() != mi)
        throw DomainError("solve_qp: constraint shapes disagree");

    Eigen::LLT<Eigen::MatrixXd> llt(p.G);
    if (llt.info() != Eigen::Success) throw DomainError("solve_qp: G is not positive definite");

    QpSolution sol;
    sol.x = -llt.solve(p.a);
    ActiveSet active(llt, n);
    Eigen::VectorXd u(0);
    Eigen::VectorXd z;
    Eigen::VectorXd r;

    const double scale = 1.0 + p.a.lpNorm<Eigen::Infinity>();
    const double feas_tol = 1e-11 * (1.0 + (mi > 0 ? p.ci.lpNorm<Eigen::Infinity>() : 0.0) +
                                     (me > 0 ? p.ce.lpNorm<Eigen::Infinity>() : 0.0));

    for (Eigen::Index i = 0; i < me; ++i) {
        const Eigen::VectorXd np = p.Ce.col(i);
        const double s = np.dot(sol.x) + p.ce(i);
        active.directions(np, z, r);
        const double curvature = z.dot(np);
        if (!(curvature > 1e-14 * np.squaredNorm())) {
            if (std::abs(s) > feas_tol * (1.0 + np.norm())) throw InfeasibleError("solve_qp: inconsistent equalities");
            continue;
        }
        const double t = -s / curvature;
        sol.x += t * z;
        Eigen::VectorXd next(u.size() + 1);
        next.head(u.size()) = u - t * r;
        next(u.size()) = t;
        u = next;
        active.add({true, static_cast<int>(i)}, np);
    }

    std::vector<bool> is_active(static_cast<std::size_t>(mi), false);
    const int max_iter = 50 * static_cast<int>(n + me + mi) + 100;
    for (;;) {
        if (++sol.iterations > max_iter) throw NumericError("solve_qp: iteration limit reached");
        int pick = -1;
        double worst = -feas_tol;
        for (Eigen::Index i = 0; i < mi; ++i) {
            if (is_active[static_cast<std::size_t>(i)]) continue;
            const double s = p.Ci.col(i).dot(sol.x) + p.ci(i);
            const double tol_i = feas_tol * (1.0 + p.Ci.col(i).norm() * (1.0 + sol.x.norm()));
            if (s < -tol_i && s < worst) {
                worst = s;
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) break;
        const Eigen::VectorXd np = p.Ci.col(pick);
        Eigen::VectorXd u_plus(u.size() + 1);
        u_plus.head(u.size()) = u;
        u_plus(u.size()) = 0.0;

        for (;;) {
            if (++sol.iterations > max_iter) throw NumericError("solve_qp: iteration limit reached");
            active.directions(np, z, r);
            const Eigen::Index q = active.size();
            double t1 = kInf;
            Eigen::Index drop = -1;
            for (Eigen::Index j = 0; j < q; ++j) {
                if (active.items()[static_cast<std::size_t>(j)].equality) continue;
                if (r(j) > 1e-14 * scale) {
                    const double ratio = u_plus(j) / r(j);
                    if (ratio < t1) {
                        t1 = ratio;
                        drop = j;
                    }
                }
            }
            const double curvature = z.dot(np);
            const double s = np.dot(sol.x) + p.ci(pick);
            const double t2 = curvature > 1e-14 * np.squaredNorm() ? -s / curvature : kInf;
            if (t1 == kInf && t2 == kInf)
                throw InfeasibleError("solve_qp: constraints are inconsistent (constraint " + std::to_string(pick) +
                                      ")");
            if (t2 == kInf) {
                u_plus.head(q) -= t1 * r;
                u_plus(q) += t1;
            } else {
                const double t = std::min(t1, t2);
                sol.x += t * z;
                u_plus.head(q) -= t * r;
                u_plus(q) += t;
                if (t2 <= t1) {
                    u = u_plus;
                    active.add({false, pick}, np);
                    is_active[static_cast<std::size_t>(pick)] = true;
                    break;
                }
            }
            const int dropped = active.items()[static_cast<std::size_t>(drop)].index;
            is_active[static_cast<std::size_t>(dropped)] = false;
            Eigen::VectorXd shrunk(u_plus.size() - 1);
            shrunk << u_plus.head(drop), u_plus.tail(u_plus.size() - drop - 1);
            u_plus = shrunk;
            active.remove(static_cast<std::size_t>(drop));
        }
    }

    sol.lambda_eq = Eigen::VectorXd::Zero(me);
    sol.lambda_ineq = Eigen::VectorXd::Zero(mi);
    for (Eigen::Index j = 0; j < active.size(); ++j) {
        const auto& item = active.items()[static_cast<std::size_t>(j)];
        if (item.equality)
            sol.lambda_eq(item.index) += u(j);
        else {
            sol.lambda_ineq(item.index) = u(j);
            sol.active.push_back(item.index);
        }
    }
    sol.objective = 0.5 * sol.x.dot(p.G * sol.x) + p.a.dot(sol.x);
    return sol;
}

}  // namespace rsma
