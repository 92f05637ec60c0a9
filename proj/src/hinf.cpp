#include "navsim/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "navsim/errors.hpp"

namespace navsim {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using cd = std::complex<double>;

StateSpace ErrorSystem::as_state_space() const {
    return {A, B, C, D};
}

ErrorSystem error_system(const ParamPoint& rho, const Mat6& L, const PlantModel& model) {
    const auto pm = model.at(rho);
    ErrorSystem es;
    es.A = pm.A + L * pm.C_y;
    es.B = pm.B_w + L * pm.D_w;
    es.C = pm.C_z;
    es.D.setZero();
    return es;
}

double spectral_abscissa(const MatrixXd& A) {
    Eigen::EigenSolver<MatrixXd> es(A, false);
    return es.eigenvalues().real().maxCoeff();
}

double spectral_radius(const MatrixXd& A) {
    Eigen::EigenSolver<MatrixXd> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_hurwitz(const MatrixXd& A) {
    const double scale = std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
    return spectral_abscissa(A) < -1e-9 * scale;
}

double sigma_max(const StateSpace& sys, double omega) {
    const auto n = sys.A.rows();
    MatrixXcd M = -sys.A.cast<cd>();
    M.diagonal().array() += cd(0.0, omega);
    const MatrixXcd G = sys.C.cast<cd>() * M.partialPivLu().solve(sys.B.cast<cd>()) + sys.D.cast<cd>();
    (void)n;
    const MatrixXcd gram = G.rows() <= G.cols() ? MatrixXcd(G * G.adjoint()) : MatrixXcd(G.adjoint() * G);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

namespace {

void check_dims(const StateSpace& s) {
    const auto n = s.A.rows();
    if (s.A.cols() != n || s.B.rows() != n || s.C.cols() != n || s.D.rows() != s.C.rows() ||
        s.D.cols() != s.B.cols()) {
        throw std::invalid_argument("state-space dimensions are inconsistent");
    }
}

// Natural frequencies of A, used to seed sweeps.
std::vector<double> modal_frequencies(const MatrixXd& A) {
    Eigen::EigenSolver<MatrixXd> es(A, false);
    std::vector<double> w;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double m = std::abs(es.eigenvalues()[i]);
        if (m > 0.0) {
            w.push_back(m);
            w.push_back(std::abs(es.eigenvalues()[i].imag()));
        }
    }
    return w;
}

// Largest gain found at the imaginary-axis eigenvalues of the Hamiltonian
// for level gamma, at their midpoints, and at w = 0. A value above gamma
// proves gamma is below the norm.
double level_crossing_peak(const StateSpace& sys, double gamma) {
    const auto n = sys.A.rows();
    const auto m = sys.B.cols();
    const auto p = sys.C.rows();
    const double g2 = gamma * gamma;

    const MatrixXd R = sys.D.transpose() * sys.D - g2 * MatrixXd::Identity(m, m);
    const MatrixXd S = sys.D * sys.D.transpose() - g2 * MatrixXd::Identity(p, p);
    const auto Rlu = R.partialPivLu();
    const MatrixXd H11 = sys.A - sys.B * Rlu.solve(sys.D.transpose() * sys.C);

    MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = H11;
    H.topRightCorner(n, n) = -gamma * sys.B * Rlu.solve(sys.B.transpose());
    H.bottomLeftCorner(n, n) = gamma * sys.C.transpose() * S.partialPivLu().solve(sys.C);
    H.bottomRightCorner(n, n) = -H11.transpose();

    Eigen::EigenSolver<MatrixXd> es(H, false);
    std::vector<double> freqs{0.0};
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cd lam = es.eigenvalues()[i];
        if (std::abs(lam.real()) <= 1e-6 * std::max(1.0, std::abs(lam))) {
            freqs.push_back(std::abs(lam.imag()));
        }
    }
    if (freqs.size() == 1) {
        return sigma_max(sys, 0.0);
    }
    std::sort(freqs.begin(), freqs.end());
    double peak = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        peak = std::max(peak, sigma_max(sys, freqs[i]));
        if (i + 1 < freqs.size() && freqs[i + 1] > freqs[i]) {
            peak = std::max(peak, sigma_max(sys, 0.5 * (freqs[i] + freqs[i + 1])));
        }
    }
    return peak;
}

}  // namespace

double sweep_peak(const StateSpace& sys, int points) {
    check_dims(sys);
    auto modes = modal_frequencies(sys.A);
    double lo = 1.0, hi = 1.0;
    if (!modes.empty()) {
        const auto [mn, mx] = std::minmax_element(modes.begin(), modes.end());
        lo = std::max(*mn, 1e-6) * 1e-2;
        hi = *mx * 1e2;
    }
    double peak = sigma_max(sys, 0.0);
    for (double w : modes) {
        peak = std::max(peak, sigma_max(sys, w));
    }
    const double step = points > 1 ? std::log(hi / lo) / (points - 1) : 0.0;
    for (int i = 0; i < points; ++i) {
        peak = std::max(peak, sigma_max(sys, lo * std::exp(step * i)));
    }
    return peak;
}

double hinf_norm(const StateSpace& sys, double tol) {
    check_dims(sys);
    if (!(tol > 0.0)) {
        throw std::invalid_argument("hinf_norm tolerance must be positive");
    }
    if (!is_hurwitz(sys.A)) {
        std::ostringstream os;
        os << "A is not Hurwitz (spectral abscissa " << spectral_abscissa(sys.A) << ")";
        throw Unstable(os.str());
    }

    double lb = sys.D.size() ? Eigen::JacobiSVD<MatrixXd>(sys.D).singularValues()(0) : 0.0;
    lb = std::max(lb, sweep_peak(sys, 40));
    if (lb == 0.0) {
        return 0.0;
    }

    double ub = 2.0 * lb;
    for (int i = 0; i < 60; ++i) {
        const double peak = level_crossing_peak(sys, ub);
        if (peak <= ub) {
            break;
        }
        lb = std::max(lb, peak);
        ub = 2.0 * peak;
    }

    bool lifted = true;
    for (int iter = 0; iter < 200 && ub - lb > 2.0 * tol * lb; ++iter) {
        const double mid = 0.5 * (lb + ub);
        const double gamma = lifted ? std::min(lb * (1.0 + tol), mid) : mid;
        const double peak = level_crossing_peak(sys, gamma);
        if (peak > gamma) {
            lb = std::max(lb, peak);
            lifted = true;
        } else {
            ub = gamma;
            lifted = false;
        }
    }
    return 0.5 * (lb + ub);
}

double hinf_norm(const ErrorSystem& sys, double tol) {
    return hinf_norm(sys.as_state_space(), tol);
}

namespace {

// Returns early with a value above `cutoff` as soon as one grid point exceeds
// it. `first` is evaluated first.
double worst_case_bounded(const Mat6& L, std::span<const ParamPoint> grid, const PlantModel& model,
                          double tol, double cutoff, double max_frequency,
                          std::size_t* argmax = nullptr, std::size_t first = 0) {
    std::vector<ErrorSystem> systems;
    systems.reserve(grid.size());
    for (const auto& rho : grid) {
        systems.push_back(error_system(rho, L, model));
        const auto& A = systems.back().A;
        if (!is_hurwitz(A) || (max_frequency > 0.0 && spectral_radius(A) > max_frequency)) {
            if (argmax) {
                *argmax = systems.size() - 1;
            }
            return kInfiniteGain;
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t i = (k + first) % grid.size();
        const double g = hinf_norm(systems[i], tol);
        if (g > worst) {
            worst = g;
            if (argmax) {
                *argmax = i;
            }
        }
        if (worst > cutoff) {
            break;
        }
    }
    return worst;
}

}  // namespace

double worst_case_gamma(const Mat6& L, std::span<const ParamPoint> grid, const PlantModel& model,
                        double tol, double max_frequency) {
    return worst_case_bounded(L, grid, model, tol, kInfiniteGain, max_frequency);
}

int observability_rank(const MatrixXd& A, const MatrixXd& C) {
    const auto n = A.rows();
    MatrixXd O(C.rows() * n, n);
    MatrixXd blk = C;
    for (Eigen::Index k = 0; k < n; ++k) {
        // Row-normalize each block so powers of A do not swamp the rank test.
        const double s = blk.norm();
        O.middleRows(k * C.rows(), C.rows()) = s > 0.0 ? MatrixXd(blk / s) : blk;
        blk = blk * A;
    }
    Eigen::JacobiSVD<MatrixXd> svd(O);
    const auto& sv = svd.singularValues();
    const double thresh = 1e-10 * std::max(1.0, sv(0));
    return static_cast<int>((sv.array() > thresh).count());
}

MatrixXd solve_filter_riccati(const MatrixXd& A, const MatrixXd& G, const MatrixXd& Q) {
    const auto n = A.rows();
    MatrixXd Z(2 * n, 2 * n);
    Z << A.transpose(), -G, -Q, -A;

    for (int iter = 0; iter < 100; ++iter) {
        const auto lu = Z.partialPivLu();
        const double logdet = lu.matrixLU().diagonal().array().abs().log().sum();
        const double c = std::exp(logdet / static_cast<double>(2 * n));
        const MatrixXd next = 0.5 * (Z / c + c * lu.inverse());
        const double change = (next - Z).norm();
        Z = next;
        if (change <= 1e-13 * Z.norm()) {
            break;
        }
    }

    const MatrixXd I = MatrixXd::Identity(n, n);
    MatrixXd lhs(2 * n, n), rhs(2 * n, n);
    lhs << Z.topRightCorner(n, n), Z.bottomRightCorner(n, n) + I;
    rhs << Z.topLeftCorner(n, n) + I, Z.bottomLeftCorner(n, n);
    MatrixXd P = lhs.colPivHouseholderQr().solve(-rhs);
    P = 0.5 * (P + P.transpose()).eval();

    const MatrixXd res = A * P + P * A.transpose() - P * G * P + Q;
    if (!P.allFinite() || res.norm() > 1e-6 * std::max(1.0, Q.norm() + (A * P).norm())) {
        throw SynthesisFailed("Riccati solution did not converge");
    }
    return P;
}

Mat6 initial_gain(const ParamPoint& nominal, double pole_scale, const PlantModel& model) {
    const auto pm = model.at(nominal);
    if (observability_rank(pm.A, pm.C_y) < 6) {
        throw NotObservable("(A, C_y) not observable at the nominal parameter");
    }
    const Mat6 R = pm.D_w * pm.D_w.transpose();
    const Mat6 Rinv = R.inverse();
    const Mat6 G = pm.C_y.transpose() * Rinv * pm.C_y;
    const Mat6 Q = pm.B_w * pm.B_w.transpose();
    const Mat6 As = pm.A + pole_scale * Mat6::Identity();
    const Mat6 P = solve_filter_riccati(As, G, Q);
    return -P * pm.C_y.transpose() * Rinv;
}

void SynthesisConfig::validate() const {
    if (synthesis_n1 < 2 || synthesis_n2 < 2 || validation_n1 < 2 || validation_n2 < 2) {
        throw ValidationError("synthesis.grid", "grid densities must be at least 2");
    }
    if ((validation_n1 - 1) % (synthesis_n1 - 1) != 0 ||
        (validation_n2 - 1) % (synthesis_n2 - 1) != 0) {
        throw ValidationError("synthesis.grid", "validation grid must contain the synthesis grid");
    }
    if (!(gamma_tol > 0.0) || restarts < 1 || max_sweeps < 1 || !(initial_step > min_step) ||
        !(min_step > 0.0) || !(pole_scale > 0.0) || !(adequacy > 0.0) || max_densify < 0 ||
        !(max_frequency >= 0.0)) {
        throw ValidationError("synthesis", "invalid optimizer settings");
    }
}

namespace {

struct SearchResult {
    Mat6 L;
    double f;
};

class CompassSearch {
public:
    CompassSearch(const SynthesisConfig& cfg, const PlantModel& model, SynthesisLog& log)
        : cfg_(cfg), model_(model), log_(log), rng_(cfg.seed) {}

    double objective(const Mat6& L, double cutoff) {
        ++log_.evaluations;
        std::size_t arg = hot_;
        const double f = worst_case_bounded(L, grid_, model_, cfg_.gamma_tol, cutoff, cfg_.max_frequency,
                                            &arg, hot_);
        hot_ = arg;
        return f;
    }

    void set_grid(std::vector<ParamPoint> grid) {
        grid_ = std::move(grid);
        hot_ = 0;
    }

    SearchResult run(Mat6 L, double step) {
        double f = objective(L, kInfiniteGain);
        if (!std::isfinite(f)) {
            return {L, f};
        }
        Eigen::Matrix<double, 36, 1> scale;
        const double floor = 0.05 * L.cwiseAbs().maxCoeff();
        for (int i = 0; i < 36; ++i) {
            scale[i] = std::max(std::abs(L(i / 6, i % 6)), floor);
        }
        std::vector<int> order(36);
        std::iota(order.begin(), order.end(), 0);

        for (int sweep = 0; sweep < cfg_.max_sweeps && step >= cfg_.min_step; ++sweep) {
            ++log_.sweeps;
            std::shuffle(order.begin(), order.end(), rng_);
            bool improved = false;
            for (int i : order) {
                for (double sign : {1.0, -1.0}) {
                    Mat6 trial = L;
                    trial(i / 6, i % 6) += sign * step * scale[i];
                    const double ft = objective(trial, f);
                    if (ft < f) {
                        L = trial;
                        f = ft;
                        improved = true;
                        break;
                    }
                }
            }
            log_.objective_trace.push_back(f);
            if (!improved) {
                step *= 0.5;
            }
        }
        return {L, f};
    }

private:
    const SynthesisConfig& cfg_;
    const PlantModel& model_;
    SynthesisLog& log_;
    std::mt19937_64 rng_;
    std::vector<ParamPoint> grid_;
    std::size_t hot_ = 0;
};

}  // namespace

ObserverGain synthesize_gain(const SynthesisConfig& cfg, const PlantModel& model) {
    cfg.validate();
    model.box.validate();

    const auto val_grid = param_grid(model.box, cfg.validation_n1, cfg.validation_n2);
    std::vector<ParamPoint> syn_grid = param_grid(model.box, cfg.synthesis_n1, cfg.synthesis_n2);
    const ParamPoint nominal = model.box.center();

    ObserverGain out;
    out.box = model.box;
    out.synthesis_n1 = cfg.synthesis_n1;
    out.synthesis_n2 = cfg.synthesis_n2;
    out.validation_n1 = cfg.validation_n1;
    out.validation_n2 = cfg.validation_n2;

    CompassSearch search(cfg, model, out.log);
    search.set_grid(syn_grid);

    // Restart r starts from the Riccati design with decay rate pole_scale * 2^k,
    // k = 0, 1, -1, 2, -2, ...
    SearchResult best{Mat6::Zero(), kInfiniteGain};
    for (int r = 0; r < cfg.restarts; ++r) {
        const int k = (r % 2 == 1) ? (r + 1) / 2 : -(r / 2);
        const double scale = cfg.pole_scale * std::ldexp(1.0, k);
        Mat6 L0;
        try {
            L0 = initial_gain(nominal, scale, model);
        } catch (const SynthesisFailed&) {
            continue;
        }
        // Shrink designs that violate the frequency bound until they fit.
        for (int k = 0; k < 40 && cfg.max_frequency > 0.0; ++k) {
            double radius = 0.0;
            for (const auto& rho : syn_grid) {
                radius = std::max(radius, spectral_radius(error_system(rho, L0, model).A));
            }
            if (radius <= cfg.max_frequency) {
                break;
            }
            L0 *= 0.7;
        }
        const double f0 = search.objective(L0, kInfiniteGain);
        if (r == 0) {
            out.log.initial_objective = f0;
        }
        ++out.log.restarts_run;
        auto res = search.run(L0, cfg.initial_step);
        if (res.f < best.f) {
            best = res;
        }
    }
    if (!std::isfinite(best.f)) {
        throw SynthesisFailed("no restart produced a gain stabilizing the synthesis grid");
    }

    // Validation with densification: add the worst validation point to the
    // synthesis grid until the two levels agree.
    double val_gamma = kInfiniteGain;
    for (int round = 0;; ++round) {
        std::size_t arg = 0;
        val_gamma = worst_case_bounded(best.L, val_grid, model, cfg.gamma_tol, kInfiniteGain,
                                       cfg.max_frequency, &arg);
        if (std::isfinite(val_gamma) && val_gamma <= (1.0 + cfg.adequacy) * best.f) {
            break;
        }
        if (round >= cfg.max_densify) {
            break;
        }
        ++out.log.densify_rounds;
        syn_grid.push_back(val_grid[arg]);
        out.extra_points.push_back(val_grid[arg]);
        search.set_grid(syn_grid);
        auto res = search.run(best.L, cfg.initial_step / 4.0);
        best = res;
    }
    if (!std::isfinite(val_gamma)) {
        throw SynthesisFailed("synthesized gain does not stabilize the validation grid");
    }

    double abscissa = -kInfiniteGain;
    for (const auto& rho : val_grid) {
        abscissa = std::max(abscissa, spectral_abscissa(error_system(rho, best.L, model).A));
    }

    out.L = best.L;
    out.gamma = val_gamma;
    out.gamma_synthesis = best.f;
    out.stability_margin = -abscissa;
    out.log.final_objective = best.f;
    return out;
}

}  // namespace navsim
