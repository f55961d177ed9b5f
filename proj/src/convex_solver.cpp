#include "secrecy/convex_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace secrecy::solver {

double AffineExpr::eval(std::span<const double> z) const {
    double v = constant;
    for (const auto& t : terms) v += t.coeff * z[t.index];
    return v;
}

double Constraint::eval(std::span<const double> z) const {
    double v = linear.eval(z);
    for (const auto& s : squares) {
        const double e = s.eval(z);
        v += e * e;
    }
    return v;
}

double ConvexProblem::objective(std::span<const double> z) const {
    double v = 0.0;
    for (std::size_t j = 0; j < linear_objective.size(); ++j) v += linear_objective[j] * z[j];
    for (const auto& t : log_terms) v -= t.weight * std::log1p(t.c / z[t.index]);
    return v;
}

double ConvexProblem::max_violation(std::span<const double> z) const {
    double worst = 0.0;
    for (const auto& c : constraints) worst = std::max(worst, c.eval(z));
    return worst;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// A constraint restricted to the variables it touches.
struct LocalConstraint {
    std::vector<std::size_t> idx;
    std::vector<std::vector<double>> sq_coeff;  // [k][local]
    std::vector<double> sq_const;
    std::vector<double> lin;                    // [local]
    double lin_const = 0.0;
    std::vector<double> hess;                   // constant, row-major local x local
};

std::size_t local_slot(std::vector<std::size_t>& idx, std::size_t global) {
    auto it = std::find(idx.begin(), idx.end(), global);
    if (it != idx.end()) return static_cast<std::size_t>(it - idx.begin());
    idx.push_back(global);
    return idx.size() - 1;
}

LocalConstraint compile(const Constraint& c, std::size_t num_vars) {
    LocalConstraint lc;
    auto check = [&](std::size_t i) {
        if (i >= num_vars) throw std::invalid_argument("constraint references variable out of range");
    };
    for (const auto& s : c.squares) for (const auto& t : s.terms) { check(t.index); local_slot(lc.idx, t.index); }
    for (const auto& t : c.linear.terms) { check(t.index); local_slot(lc.idx, t.index); }
    const std::size_t k = lc.idx.size();
    for (const auto& s : c.squares) {
        std::vector<double> row(k, 0.0);
        for (const auto& t : s.terms) row[local_slot(lc.idx, t.index)] += t.coeff;
        lc.sq_coeff.push_back(std::move(row));
        lc.sq_const.push_back(s.constant);
    }
    lc.lin.assign(k, 0.0);
    for (const auto& t : c.linear.terms) lc.lin[local_slot(lc.idx, t.index)] += t.coeff;
    lc.lin_const = c.linear.constant;
    lc.hess.assign(k * k, 0.0);
    for (const auto& row : lc.sq_coeff) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) lc.hess[i * k + j] += 2.0 * row[i] * row[j];
    }
    return lc;
}

struct Evaluated {
    double g = 0.0;
    std::vector<double> grad;  // local
};

Evaluated evaluate(const LocalConstraint& lc, const Vec& z) {
    const std::size_t k = lc.idx.size();
    Evaluated e;
    e.grad = lc.lin;
    e.g = lc.lin_const;
    for (std::size_t i = 0; i < k; ++i) e.g += lc.lin[i] * z[static_cast<Eigen::Index>(lc.idx[i])];
    for (std::size_t r = 0; r < lc.sq_coeff.size(); ++r) {
        double s = lc.sq_const[r];
        for (std::size_t i = 0; i < k; ++i) s += lc.sq_coeff[r][i] * z[static_cast<Eigen::Index>(lc.idx[i])];
        e.g += s * s;
        for (std::size_t i = 0; i < k; ++i) e.grad[i] += 2.0 * s * lc.sq_coeff[r][i];
    }
    return e;
}

// g(z + s*d) = g + s*slope + s^2*curv
void directional(const LocalConstraint& lc, const Evaluated& e, const Vec& d, double& slope, double& curv) {
    const std::size_t k = lc.idx.size();
    slope = 0.0;
    for (std::size_t i = 0; i < k; ++i) slope += e.grad[i] * d[static_cast<Eigen::Index>(lc.idx[i])];
    curv = 0.0;
    for (const auto& row : lc.sq_coeff) {
        double ad = 0.0;
        for (std::size_t i = 0; i < k; ++i) ad += row[i] * d[static_cast<Eigen::Index>(lc.idx[i])];
        curv += ad * ad;
    }
}

class Barrier {
public:
    Barrier(const ConvexProblem& prob)
        : prob_(prob), n_(prob.num_vars), lin_(Vec::Zero(static_cast<Eigen::Index>(prob.num_vars))) {
        if (!prob.linear_objective.empty()) {
            if (prob.linear_objective.size() != n_) throw std::invalid_argument("objective length mismatch");
            for (std::size_t j = 0; j < n_; ++j) lin_[static_cast<Eigen::Index>(j)] = prob.linear_objective[j];
        }
        for (const auto& t : prob.log_terms) {
            if (t.index >= n_) throw std::invalid_argument("log term references variable out of range");
            if (!(t.c >= 0.0) || !(t.weight >= 0.0)) throw std::invalid_argument("log term must be concave");
        }
        local_.reserve(prob.constraints.size());
        for (const auto& c : prob.constraints) local_.push_back(compile(c, n_));
        evals_.resize(local_.size());
    }

    std::size_t num_constraints() const { return local_.size(); }

    // Fills constraint values/gradients at z. False if z is outside the domain.
    bool update(const Vec& z) {
        for (const auto& t : prob_.log_terms) {
            if (!(z[static_cast<Eigen::Index>(t.index)] > 0.0)) return false;
        }
        for (std::size_t i = 0; i < local_.size(); ++i) {
            evals_[i] = evaluate(local_[i], z);
            if (!(evals_[i].g < 0.0)) return false;
        }
        return true;
    }

    // Gradient of the minimized function f0 = -objective.
    Vec objective_gradient(const Vec& z) const {
        Vec g = -lin_;
        for (const auto& t : prob_.log_terms) {
            const double v = z[static_cast<Eigen::Index>(t.index)];
            g[static_cast<Eigen::Index>(t.index)] -= t.weight * t.c / (v * (v + t.c));
        }
        return g;
    }

    void assemble(const Vec& z, double kappa, Vec& grad, SpMat& hess) {
        grad = kappa * objective_gradient(z);
        triplets_.clear();
        for (std::size_t j = 0; j < n_; ++j) {
            triplets_.emplace_back(static_cast<int>(j), static_cast<int>(j), 0.0);
        }
        for (const auto& t : prob_.log_terms) {
            const double v = z[static_cast<Eigen::Index>(t.index)];
            const double h = t.weight * t.c * (2.0 * v + t.c) / (v * v * (v + t.c) * (v + t.c));
            triplets_.emplace_back(static_cast<int>(t.index), static_cast<int>(t.index), kappa * h);
        }
        for (std::size_t i = 0; i < local_.size(); ++i) {
            const auto& lc = local_[i];
            const auto& e = evals_[i];
            const double slack = -e.g;
            const std::size_t k = lc.idx.size();
            for (std::size_t a = 0; a < k; ++a) {
                grad[static_cast<Eigen::Index>(lc.idx[a])] += e.grad[a] / slack;
                for (std::size_t b = 0; b < k; ++b) {
                    const double h = e.grad[a] * e.grad[b] / (slack * slack) + lc.hess[a * k + b] / slack;
                    triplets_.emplace_back(static_cast<int>(lc.idx[a]), static_cast<int>(lc.idx[b]), h);
                }
            }
        }
        hess.setFromTriplets(triplets_.begin(), triplets_.end());
    }

    // Largest step keeping every constraint and log-term argument strictly interior.
    double max_step(const Vec& z, const Vec& d) const {
        double s_max = std::numeric_limits<double>::infinity();
        for (const auto& t : prob_.log_terms) {
            const double dj = d[static_cast<Eigen::Index>(t.index)];
            if (dj < 0.0) s_max = std::min(s_max, -z[static_cast<Eigen::Index>(t.index)] / dj);
        }
        for (std::size_t i = 0; i < local_.size(); ++i) {
            double slope = 0.0, curv = 0.0;
            directional(local_[i], evals_[i], d, slope, curv);
            const double g = evals_[i].g;
            double root = std::numeric_limits<double>::infinity();
            if (curv > 0.0) {
                root = -2.0 * g / (slope + std::sqrt(slope * slope - 4.0 * curv * g));
            } else if (slope > 0.0) {
                root = -g / slope;
            }
            s_max = std::min(s_max, root);
        }
        return s_max;
    }

    // F(z + s d) - F(z), evaluated term by term to avoid cancellation.
    double delta(const Vec& z, const Vec& d, double s, double kappa) const {
        double df0 = -s * lin_.dot(d);
        for (const auto& t : prob_.log_terms) {
            const double v = z[static_cast<Eigen::Index>(t.index)];
            const double step = s * d[static_cast<Eigen::Index>(t.index)];
            df0 += t.weight * (std::log1p(step / (v + t.c)) - std::log1p(step / v));
        }
        double dbar = 0.0;
        for (std::size_t i = 0; i < local_.size(); ++i) {
            double slope = 0.0, curv = 0.0;
            directional(local_[i], evals_[i], d, slope, curv);
            const double change = s * slope + s * s * curv;
            const double ratio = change / evals_[i].g;  // relative change of the negative value
            if (!(ratio > -1.0)) return std::numeric_limits<double>::infinity();
            dbar -= std::log1p(ratio);
        }
        return kappa * df0 + dbar;
    }

    // Multipliers linearized along the Newton step d: mu (1 + grad g . d / s).
    std::vector<double> corrected_multipliers(const Vec& d, double kappa) const {
        std::vector<double> mu(local_.size());
        for (std::size_t i = 0; i < local_.size(); ++i) {
            double slope = 0.0, curv = 0.0;
            directional(local_[i], evals_[i], d, slope, curv);
            const double slack = -evals_[i].g;
            mu[i] = std::max(0.0, (1.0 + slope / slack) / (kappa * slack));
        }
        return mu;
    }

    // Multipliers minimizing |grad f0 + J mu|^2 + sum (mu_i s_i)^2, the squared
    // KKT residual at the current point. Sharper than 1/(kappa s) when active
    // slacks are below the resolution of the iterates.
    std::vector<double> least_squares_multipliers(const Vec& z) const {
        const auto n = static_cast<Eigen::Index>(n_);
        const auto m = static_cast<Eigen::Index>(local_.size());
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < local_.size(); ++i) {
            for (std::size_t a = 0; a < local_[i].idx.size(); ++a) {
                trip.emplace_back(static_cast<int>(local_[i].idx[a]), static_cast<int>(i), evals_[i].grad[a]);
            }
        }
        SpMat J(n, m);
        J.setFromTriplets(trip.begin(), trip.end());
        SpMat A = SpMat(J.transpose() * J);
        for (Eigen::Index i = 0; i < m; ++i) A.coeffRef(i, i) += evals_[static_cast<std::size_t>(i)].g * evals_[static_cast<std::size_t>(i)].g;
        const Vec g0 = objective_gradient(z);
        const Vec rhs = -(J.transpose() * g0);
        Eigen::SimplicialLDLT<SpMat> ldlt(A);
        if (ldlt.info() != Eigen::Success) return {};
        Vec mu = ldlt.solve(rhs);
        mu += ldlt.solve(rhs - A * mu);
        std::vector<double> out(local_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, mu[static_cast<Eigen::Index>(i)]);
        return out;
    }

    std::vector<double> multipliers(double kappa) const {
        std::vector<double> mu(local_.size());
        for (std::size_t i = 0; i < local_.size(); ++i) mu[i] = 1.0 / (kappa * (-evals_[i].g));
        return mu;
    }

private:
    const ConvexProblem& prob_;
    std::size_t n_;
    Vec lin_;
    std::vector<LocalConstraint> local_;
    std::vector<Evaluated> evals_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

Vec to_vec(std::span<const double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

double kkt_residual(const ConvexProblem& prob, std::span<const double> point, std::span<const double> multipliers) {
    if (point.size() != prob.num_vars) throw std::invalid_argument("point dimension mismatch");
    if (multipliers.size() != prob.constraints.size()) throw std::invalid_argument("multiplier count mismatch");
    std::vector<double> station(prob.num_vars, 0.0);
    for (std::size_t j = 0; j < prob.linear_objective.size(); ++j) station[j] = -prob.linear_objective[j];
    for (const auto& t : prob.log_terms) {
        const double v = point[t.index];
        station[t.index] -= t.weight * t.c / (v * (v + t.c));
    }
    double comp = 0.0;
    for (std::size_t i = 0; i < prob.constraints.size(); ++i) {
        const double mu = multipliers[i];
        if (mu < 0.0) throw std::invalid_argument("multipliers must be nonnegative");
        const auto& c = prob.constraints[i];
        for (const auto& t : c.linear.terms) station[t.index] += mu * t.coeff;
        for (const auto& s : c.squares) {
            const double e = s.eval(point);
            for (const auto& t : s.terms) station[t.index] += mu * 2.0 * e * t.coeff;
        }
        comp = std::max(comp, std::abs(mu * c.eval(point)));
    }
    double worst = 0.0;
    for (double v : station) worst = std::max(worst, std::abs(v));
    return worst + comp;
}

SolverReport solve(const ConvexProblem& prob, const SolverOptions& opts) {
    if (prob.start.size() != prob.num_vars) throw std::invalid_argument("start point dimension mismatch");
    Barrier barrier(prob);
    Vec z = to_vec(prob.start);
    if (!barrier.update(z)) throw std::invalid_argument("start point is not strictly feasible");

    const auto n = static_cast<Eigen::Index>(prob.num_vars);
    const double m = static_cast<double>(barrier.num_constraints());
    SolverReport report;
    SpMat hess(n, n);
    Vec grad(n);
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;

    double kappa = opts.kappa0;
    bool ok = true;
    // Multipliers 1/(kappa s) certify poorly along stiff barrier
    // directions, so also try first-order corrected multipliers after one
    // more Newton step and least-squares multipliers; keep the best.
    auto certify = [&](double kap) {
        barrier.update(z);
        report.solution = to_std(z);
        report.multipliers = barrier.multipliers(kap);
        report.kkt_residual = kkt_residual(prob, report.solution, report.multipliers);
        barrier.assemble(z, kap, grad, hess);
        ldlt.factorize(hess);
        if (ldlt.info() == Eigen::Success) {
            Vec step = ldlt.solve(-grad);
            auto mu = barrier.corrected_multipliers(step, kap);
            if (barrier.max_step(z, step) > 1.0 / opts.boundary_fraction) {
                Vec next = z + step;
                if (barrier.update(next)) {
                    auto cand = to_std(next);
                    const double r = kkt_residual(prob, cand, mu);
                    if (r < report.kkt_residual) {
                        report.solution = std::move(cand);
                        report.multipliers = std::move(mu);
                        report.kkt_residual = r;
                    }
                }
            }
        }
        const Vec at = to_vec(report.solution);
        if (barrier.update(at)) {
            auto mu = barrier.least_squares_multipliers(at);
            if (!mu.empty()) {
                const double r = kkt_residual(prob, report.solution, mu);
                if (r < report.kkt_residual) {
                    report.multipliers = std::move(mu);
                    report.kkt_residual = r;
                }
            }
        }
        barrier.update(z);
        const double limit = 1e-8 * (1.0 + std::abs(prob.objective(report.solution)));
        return report.kkt_residual <= limit;
    };

    for (int stage = 1; stage <= opts.max_stages && ok; ++stage) {
        report.barrier_stages = stage;
        bool centered = false;
        for (int it = 0; it < opts.max_newton; ++it) {
            barrier.assemble(z, kappa, grad, hess);
            if (!analyzed) {
                ldlt.analyzePattern(hess);
                analyzed = true;
            }
            ldlt.factorize(hess);
            if (ldlt.info() != Eigen::Success) {
                report.message = "Newton system factorization failed";
                ok = false;
                break;
            }
            Vec step = ldlt.solve(-grad);
            const double slope = grad.dot(step);
            const double decrement2 = -slope;
            if (!(decrement2 >= 0.0) || !std::isfinite(decrement2)) {
                report.message = "Newton direction is not a descent direction";
                ok = false;
                break;
            }
            // The floor on the decrement grows with kappa; the objective
            // error it leaves is decrement2 / (2 kappa).
            if (0.5 * decrement2 <= opts.newton_tol * std::max(1.0, kappa)) {
                centered = true;
                break;
            }
            double s = std::min(1.0, opts.boundary_fraction * barrier.max_step(z, step));
            while (s > 1e-14 && !(barrier.delta(z, step, s, kappa) <= opts.armijo * s * slope)) {
                s *= opts.backtrack;
            }
            ++report.newton_iterations;

            if (s <= 1e-14) {
                // No representable decrease left: accept as centered when close.
                centered = 0.5 * decrement2 <= 1e-6 * std::max(1.0, kappa);
                if (!centered) report.message = "line search stalled";
                break;
            }
            // The analytic step bound can be off by rounding right at the boundary.
            Vec next = z + s * step;
            while (!barrier.update(next) && s > 1e-14) {
                s *= opts.backtrack;
                next = z + s * step;
            }
            if (s <= 1e-14) {
                barrier.update(z);
                centered = 0.5 * decrement2 <= 1e-6 * std::max(1.0, kappa);
                if (!centered) report.message = "iterate left the domain";
                break;
            }
            z = std::move(next);
        }
        if (!ok) break;
        if (!centered) {
            if (report.message.empty()) report.message = "Newton budget exhausted in barrier stage";
            ok = false;
            break;
        }
        // Past the gap tolerance, keep tightening only while the KKT
        // certificate is not yet good enough.
        if (m / kappa < opts.tol && certify(kappa)) break;
        if (stage == opts.max_stages) {
            if (m / kappa >= opts.tol) {
                report.message = "barrier stage budget exhausted before reaching tolerance";
                ok = false;
            }
            break;
        }
        kappa *= opts.kappa_factor;
    }

    if (!ok) {
        barrier.update(z);
        report.solution = to_std(z);
        report.multipliers = barrier.multipliers(kappa);
        report.kkt_residual = kkt_residual(prob, report.solution, report.multipliers);
    }
    report.objective = prob.objective(report.solution);
    report.max_violation = std::max(0.0, prob.max_violation(report.solution));
    report.gap_bound = m / kappa;
    if (ok) {
        const double kkt_limit = 1e-8 * (1.0 + std::abs(report.objective));
        if (report.kkt_residual > kkt_limit) {
            report.message = "KKT residual " + std::to_string(report.kkt_residual) + " above limit";
            ok = false;
        } else if (report.max_violation > 1e-10) {
            report.message = "constraint violation above limit";
            ok = false;
        }
    }
    report.status = ok ? SolveStatus::converged : SolveStatus::failed;
    if (ok) report.message = "converged";
    return report;
}

}  // namespace secrecy::solver
