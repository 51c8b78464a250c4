#include "randsum/mc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "randsum/errors.hpp"
#include "randsum/special.hpp"

namespace randsum {

namespace {

std::uint64_t batch_count(std::uint64_t n, std::uint64_t batch) { return (n + batch - 1) / batch; }

// run `work(batch_index, samples_in_batch)` over all batches, possibly in
// parallel; results land in a per-batch slot so reduction order is fixed
template <class Result, class Work>
std::vector<Result> run_batches(std::uint64_t n_samples, std::uint64_t batch_size, int threads,
                                Work&& work) {
    const std::uint64_t batches = batch_count(n_samples, batch_size);
    std::vector<Result> results(batches);
    const auto run_range = [&](std::uint64_t from, std::uint64_t to) {
        for (std::uint64_t b = from; b < to; ++b) {
            const std::uint64_t lo = b * batch_size;
            const std::uint64_t hi = std::min(n_samples, lo + batch_size);
            results[b] = work(b, hi - lo);
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(batches)));
    if (workers == 1) {
        run_range(0, batches);
        return results;
    }
    std::vector<std::future<void>> futures;
    const std::uint64_t chunk = (batches + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t from = static_cast<std::uint64_t>(w) * chunk;
        const std::uint64_t to = std::min(batches, from + chunk);
        if (from >= to) break;
        futures.push_back(std::async(std::launch::async, run_range, from, to));
    }
    for (auto& f : futures) f.get();
    return results;
}

struct TailBatch {
    std::vector<std::uint64_t> up;
    std::vector<std::uint64_t> down;
    double sum = 0.0;
    double sum_sq = 0.0;
};

EmpiricalTail finish_tail(std::span<const double> x_grid, std::vector<TailBatch> batches,
                          std::uint64_t n_samples, std::uint64_t seed, double ci_level,
                          std::string spec_id) {
    EmpiricalTail out;
    out.x.assign(x_grid.begin(), x_grid.end());
    out.n_samples = n_samples;
    out.seed = seed;
    out.ci_level = ci_level;
    out.spec_id = std::move(spec_id);
    std::vector<std::uint64_t> up(x_grid.size(), 0), down(x_grid.size(), 0);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& b : batches) {
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            up[i] += b.up[i];
            down[i] += b.down[i];
        }
        sum += b.sum;
        sum_sq += b.sum_sq;
    }
    const double n = static_cast<double>(n_samples);
    out.sample_mean = sum / n;
    out.sample_variance = std::max(0.0, sum_sq / n - out.sample_mean * out.sample_mean);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const std::uint64_t h = std::max(up[i], down[i]);
        out.hits.push_back(h);
        out.hits_up.push_back(up[i]);
        out.hits_down.push_back(down[i]);
        out.estimate.push_back(static_cast<double>(h) / n);
        const BinomialCi ci = clopper_pearson(h, n_samples, ci_level);
        out.ci_low.push_back(ci.low);
        out.ci_high.push_back(ci.high);
        out.feasible.push_back(true);
    }
    return out;
}

// least squares for y ~ c0 + c1 u + c2 v (tiny normal equations solve)
bool fit_three(const std::vector<double>& u, const std::vector<double>& v,
               const std::vector<double>& y, double& c1, double& c2) {
    const std::size_t n = u.size();
    double a[3][4] = {{0}};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {1.0, u[i], v[i]};
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) a[p][q] += row[p] * row[q];
            a[p][3] += row[p] * y[i];
        }
    }
    for (int col = 0; col < 3; ++col) { // Gaussian elimination, partial pivot
        int pivot = col;
        for (int rrow = col + 1; rrow < 3; ++rrow)
            if (std::fabs(a[rrow][col]) > std::fabs(a[pivot][col])) pivot = rrow;
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-12) return false;
        for (int rrow = 0; rrow < 3; ++rrow) {
            if (rrow == col) continue;
            const double f = a[rrow][col] / a[col][col];
            for (int q = col; q < 4; ++q) a[rrow][q] -= f * a[col][q];
        }
    }
    c1 = a[1][3] / a[1][1];
    c2 = a[2][3] / a[2][2];
    return true;
}

} // namespace

SummandLaw SummandLaw::standard_normal() {
    return SummandLaw(Kind::normal, TailFunction::standard_normal());
}

SummandLaw SummandLaw::orlicz(const OrliczTailSpec& spec) {
    SummandLaw law(spec.is_bounded() ? Kind::pm1 : Kind::orlicz, TailFunction::orlicz(spec));
    law.spec_ = spec;
    return law;
}

SummandLaw SummandLaw::two_point_pm1() { return orlicz(OrliczTailSpec::bounded(1.0)); }

SummandLaw SummandLaw::empirical(TailFunction tail) {
    if (tail.kind() != TailFunction::Kind::empirical)
        throw DomainError("SummandLaw::empirical needs an empirical tail");
    SummandLaw law(Kind::empirical, std::move(tail));
    const auto xs = law.tail_.empirical_xs();
    const auto ts = law.tail_.empirical_ts();
    double cum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double prev = (i == 0) ? 1.0 : ts[i - 1];
        const double mass = std::max(0.0, prev - ts[i]);
        if (mass > 0.0) {
            cum += mass;
            law.atom_x_.push_back(xs[i]);
            law.atom_cdf_.push_back(cum);
        }
    }
    return law;
}

double SummandLaw::sample(Rng& rng) const {
    switch (kind_) {
    case Kind::normal:
        return rng.normal();
    case Kind::orlicz:
    case Kind::pm1:
        return spec_->sample_symmetric(rng);
    case Kind::empirical: {
        const double u = rng.uniform01() * atom_cdf_.back();
        const auto it = std::lower_bound(atom_cdf_.begin(), atom_cdf_.end(), u);
        const std::size_t i = static_cast<std::size_t>(it - atom_cdf_.begin());
        return rng.sign() * atom_x_[std::min(i, atom_x_.size() - 1)];
    }
    }
    return 0.0;
}

double SummandLaw::sd() const { return std::sqrt(tail_.second_moment()); }

CumulantModel SummandLaw::make_cumulant() const {
    switch (kind_) {
    case Kind::normal:
        return CumulantModel::normal(1.0);
    case Kind::pm1:
        return CumulantModel::two_point(spec_->ess_sup());
    case Kind::orlicz:
    case Kind::empirical:
        return CumulantModel::from_tail(tail_);
    }
    return CumulantModel::normal(1.0);
}

std::string SummandLaw::describe() const {
    switch (kind_) {
    case Kind::normal:
        return "normal";
    case Kind::pm1:
        return "two_point(+-" + std::to_string(spec_->ess_sup()) + ")";
    case Kind::orlicz:
        return "orlicz(m=" + std::to_string(spec_->m()) + ",r=" + std::to_string(spec_->r()) +
               ",c1=" + std::to_string(spec_->c1()) + ",c2=" + std::to_string(spec_->c2()) + ")";
    case Kind::empirical:
        return "empirical(" + std::to_string(atom_x_.size()) + " atoms)";
    }
    return "?";
}

std::string CompoundSpec::describe() const {
    return "summand=" + summand.describe() + " index=" + index.describe();
}

EmpiricalTail simulate_tail(const CompoundSpec& spec, std::span<const double> x_grid,
                            std::uint64_t n_samples, std::uint64_t seed,
                            const SimulateOptions& options) {
    if (n_samples < 1000) throw DomainError("simulate_tail: need at least 1000 samples");
    if (x_grid.empty()) throw DomainError("simulate_tail: empty grid");
    const double sigma = spec.sd();
    const double norm = 1.0 / (sigma * std::sqrt(spec.index.mean()));

    auto batches = run_batches<TailBatch>(
        n_samples, options.batch_size, options.threads,
        [&](std::uint64_t batch, std::uint64_t count) {
            Rng rng(seed, batch);
            TailBatch out;
            out.up.assign(x_grid.size(), 0);
            out.down.assign(x_grid.size(), 0);
            for (std::uint64_t i = 0; i < count; ++i) {
                const std::uint64_t eta = spec.index.sample(rng);
                double total = 0.0;
                for (std::uint64_t k = 0; k < eta; ++k) total += spec.summand.sample(rng);
                const double s = total * norm;
                out.sum += s;
                out.sum_sq += s * s;
                for (std::size_t j = 0; j < x_grid.size(); ++j) {
                    if (s >= x_grid[j]) ++out.up[j];
                    if (s <= -x_grid[j]) ++out.down[j];
                }
            }
            return out;
        });

    EmpiricalTail out = finish_tail(x_grid, std::move(batches), n_samples, seed, options.ci_level,
                                    spec.describe());
    if (options.min_expected_hits > 0.0 && !options.gate_bounds.empty()) {
        if (options.gate_bounds.size() != x_grid.size())
            throw DomainError("simulate_tail: gate bounds must align with the grid");
        bool any = false;
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            out.feasible[i] =
                options.gate_bounds[i] * static_cast<double>(n_samples) >= options.min_expected_hits;
            any = any || out.feasible[i];
        }
        if (options.strict_gate && !any)
            throw DomainError("simulate_tail: no grid point passes the expected-hit gate");
    }
    return out;
}

EmpiricalTail simulate_fixed_n_tail(const SummandLaw& summand, std::uint64_t n_summands,
                                    std::span<const double> x_grid, std::uint64_t n_samples,
                                    std::uint64_t seed, double ci_level, int threads) {
    if (n_summands == 0) throw DomainError("simulate_fixed_n_tail: need at least one summand");
    if (n_samples < 1000) throw DomainError("simulate_fixed_n_tail: need at least 1000 samples");
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_summands));
    SimulateOptions options;
    options.threads = threads;
    auto batches = run_batches<TailBatch>(
        n_samples, options.batch_size, threads, [&](std::uint64_t batch, std::uint64_t count) {
            Rng rng(seed, batch);
            TailBatch out;
            out.up.assign(x_grid.size(), 0);
            out.down.assign(x_grid.size(), 0);
            for (std::uint64_t i = 0; i < count; ++i) {
                double total = 0.0;
                for (std::uint64_t k = 0; k < n_summands; ++k) total += summand.sample(rng);
                const double s = total * norm;
                out.sum += s;
                out.sum_sq += s * s;
                for (std::size_t j = 0; j < x_grid.size(); ++j) {
                    if (s >= x_grid[j]) ++out.up[j];
                    if (s <= -x_grid[j]) ++out.down[j];
                }
            }
            return out;
        });
    return finish_tail(x_grid, std::move(batches), n_samples, seed, ci_level,
                       summand.describe() + " n=" + std::to_string(n_summands));
}

namespace {

struct MomentBatch {
    std::vector<double> s_abs;   // |S| per sample
    std::vector<double> eta;     // eta per sample
    std::vector<double> xi_abs;  // |first summand| per sample
};

} // namespace

std::vector<MomentRow> empirical_moments(const CompoundSpec& spec, std::span<const double> p_grid,
                                         std::uint64_t n_samples, std::uint64_t seed,
                                         double burkholder_c, int threads) {
    if (n_samples < 1000) throw DomainError("empirical_moments: need at least 1000 samples");
    const double sigma = spec.sd();
    const double mean_index = spec.index.mean();
    const double norm = 1.0 / (sigma * std::sqrt(mean_index));

    constexpr std::uint64_t kBatch = 1u << 16;
    auto batches = run_batches<MomentBatch>(
        n_samples, kBatch, threads, [&](std::uint64_t batch, std::uint64_t count) {
            Rng rng(seed, batch);
            MomentBatch out;
            out.s_abs.reserve(count);
            out.eta.reserve(count);
            out.xi_abs.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) {
                const std::uint64_t eta = spec.index.sample(rng);
                double total = 0.0;
                double first = 0.0;
                for (std::uint64_t k = 0; k < eta; ++k) {
                    const double v = spec.summand.sample(rng);
                    if (k == 0) first = v;
                    total += v;
                }
                out.s_abs.push_back(std::fabs(total * norm));
                out.eta.push_back(static_cast<double>(eta));
                out.xi_abs.push_back(std::fabs(first));
            }
            return out;
        });

    std::vector<double> s_abs, eta, xi_abs;
    s_abs.reserve(n_samples);
    for (auto& b : batches) {
        s_abs.insert(s_abs.end(), b.s_abs.begin(), b.s_abs.end());
        eta.insert(eta.end(), b.eta.begin(), b.eta.end());
        xi_abs.insert(xi_abs.end(), b.xi_abs.begin(), b.xi_abs.end());
    }

    const auto p_norm = [](const std::vector<double>& v, double p) {
        double acc = 0.0;
        for (double t : v) acc += std::pow(t, p);
        return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
    };

    Rng boot_rng(seed, 0x626F6F74ULL); // dedicated bootstrap stream
    constexpr int kResamples = 200;
    std::vector<MomentRow> rows;
    for (double p : p_grid) {
        if (!(p >= 2.0)) throw DomainError("empirical_moments: p must be >= 2");
        MomentRow row;
        row.p = p;
        row.s_norm = p_norm(s_abs, p);
        row.eta_norm = p_norm(eta, p);
        row.xi_norm = p_norm(xi_abs, p);
        row.burkholder = burkholder_c * p / std::log(p);
        row.rhs = row.burkholder * std::sqrt(row.eta_norm) * row.xi_norm / (sigma * std::sqrt(mean_index));

        // percentile bootstrap over precomputed powers
        std::vector<double> powers(s_abs.size());
        for (std::size_t i = 0; i < s_abs.size(); ++i) powers[i] = std::pow(s_abs[i], p);
        std::vector<double> resampled(kResamples);
        for (int b = 0; b < kResamples; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < powers.size(); ++i) {
                const std::size_t idx =
                    static_cast<std::size_t>(boot_rng.uniform01() * static_cast<double>(powers.size()));
                acc += powers[std::min(idx, powers.size() - 1)];
            }
            resampled[b] = std::pow(acc / static_cast<double>(powers.size()), 1.0 / p);
        }
        std::sort(resampled.begin(), resampled.end());
        row.s_lo = resampled[static_cast<std::size_t>(0.025 * kResamples)];
        row.s_hi = resampled[static_cast<std::size_t>(0.975 * (kResamples - 1))];
        rows.push_back(row);
    }
    return rows;
}

std::string StoppingTimeSpec::describe() const {
    switch (rule) {
    case Rule::independent:
        return "independent(" + (index ? index->describe() : std::string("?")) + ")";
    case Rule::first_passage:
        return "first_passage(level=" + std::to_string(level) + ")";
    case Rule::fixed_window_max:
        return "fixed_window_max(window=" + std::to_string(window) + ")";
    }
    return "?";
}

StoppingExperimentResult stopping_time_experiment(const StoppingTimeSpec& spec,
                                                  const OrliczTailSpec& summand,
                                                  std::span<const double> p_grid,
                                                  std::uint64_t n_samples, std::uint64_t seed,
                                                  int threads) {
    if (n_samples < 1000) throw DomainError("stopping_time_experiment: need at least 1000 samples");
    if (spec.rule == StoppingTimeSpec::Rule::independent && !spec.index)
        throw DomainError("stopping_time_experiment: independent rule needs an index law");

    struct PathBatch {
        std::vector<double> total;
        std::vector<double> eta;
        std::uint64_t truncated = 0;
    };
    auto batches = run_batches<PathBatch>(
        n_samples, 1u << 14, threads, [&](std::uint64_t batch, std::uint64_t count) {
            Rng rng(seed, batch);
            PathBatch out;
            out.total.reserve(count);
            out.eta.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) {
                double total = 0.0;
                std::uint64_t eta = 0;
                switch (spec.rule) {
                case StoppingTimeSpec::Rule::independent: {
                    eta = std::min(spec.index->sample(rng), spec.cap);
                    for (std::uint64_t k = 0; k < eta; ++k) total += summand.sample_symmetric(rng);
                    break;
                }
                case StoppingTimeSpec::Rule::first_passage: {
                    while (eta < spec.cap) {
                        total += summand.sample_symmetric(rng);
                        ++eta;
                        if (std::fabs(total) >= spec.level) break;
                    }
                    if (eta == spec.cap && std::fabs(total) < spec.level) ++out.truncated;
                    break;
                }
                case StoppingTimeSpec::Rule::fixed_window_max: {
                    // look-ahead rule (not a stopping time): eta is where the running
                    // sum peaks inside the window
                    double running = 0.0, best = -1e308;
                    std::uint64_t best_k = 1;
                    const std::uint64_t w = std::min<std::uint64_t>(spec.window, spec.cap);
                    for (std::uint64_t k = 1; k <= w; ++k) {
                        running += summand.sample_symmetric(rng);
                        if (running > best) {
                            best = running;
                            best_k = k;
                        }
                    }
                    eta = best_k;
                    total = best;
                    break;
                }
                }
                out.total.push_back(total);
                out.eta.push_back(static_cast<double>(eta));
            }
            return out;
        });

    std::vector<double> totals, etas;
    totals.reserve(n_samples);
    etas.reserve(n_samples);
    std::uint64_t truncated = 0;
    for (auto& b : batches) {
        totals.insert(totals.end(), b.total.begin(), b.total.end());
        etas.insert(etas.end(), b.eta.begin(), b.eta.end());
        truncated += b.truncated;
    }

    StoppingExperimentResult result;
    result.truncated_fraction = static_cast<double>(truncated) / static_cast<double>(n_samples);
    double mean_eta = 0.0;
    for (double e : etas) mean_eta += e;
    mean_eta /= static_cast<double>(etas.size());
    if (spec.rule == StoppingTimeSpec::Rule::independent) mean_eta = spec.index->mean();
    result.mean_eta = mean_eta;

    // fit the tail shape of eta: log(-log T(x)) ~ const + m log x + r log log x
    // over the upper decade of observed values
    {
        std::vector<double> sorted = etas;
        std::sort(sorted.begin(), sorted.end());
        const double q90 = sorted[static_cast<std::size_t>(0.9 * (sorted.size() - 1))];
        const double x_lo = std::max(2.0, q90);
        const double x_hi = sorted.back();
        std::vector<double> us, vs, ys;
        const int points = 24;
        for (int i = 0; i < points; ++i) {
            const double x =
                x_lo * std::pow(std::max(1.001, x_hi / x_lo), static_cast<double>(i) / (points - 1));
            const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
            const double t_hat = static_cast<double>(above) / static_cast<double>(sorted.size());
            if (t_hat <= 10.0 / static_cast<double>(sorted.size()) || t_hat >= 1.0) continue;
            if (!(x > 1.0)) continue;
            us.push_back(std::log(x));
            vs.push_back(std::log(std::log(x)));
            ys.push_back(std::log(-std::log(t_hat)));
        }
        double m_fit = 1.0, r_fit = 0.0;
        // the three-parameter fit is only identifiable when log log x actually
        // varies; otherwise the log-power soaks up noise and distorts m
        bool ok = us.size() >= 6 && (us.back() - us.front()) > 0.2 &&
                  (vs.back() - vs.front()) > 0.35 && fit_three(us, vs, ys, m_fit, r_fit) &&
                  m_fit > 0.05 && std::fabs(r_fit) < 6.0;
        if (!ok && us.size() >= 3) {
            // two-parameter fallback: r pinned at 0
            double sxx = 0, sxy = 0, sx = 0, sy = 0;
            for (std::size_t i = 0; i < us.size(); ++i) {
                sx += us[i];
                sy += ys[i];
                sxx += us[i] * us[i];
                sxy += us[i] * ys[i];
            }
            const double n = static_cast<double>(us.size());
            m_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            r_fit = 0.0;
            ok = true;
        }
        result.fitted_m = ok ? std::max(0.05, m_fit) : 1.0;
        result.fitted_r = ok ? r_fit : 0.0;
    }

    result.exponents = stopped_sum_exponents(summand.m(), summand.r(), result.fitted_m,
                                             result.fitted_r);

    const double norm = 1.0 / (summand.sd() * std::sqrt(mean_eta));
    std::vector<double> s_abs(totals.size());
    for (std::size_t i = 0; i < totals.size(); ++i) s_abs[i] = std::fabs(totals[i] * norm);
    const auto p_norm = [&](double p) {
        double acc = 0.0;
        for (double t : s_abs) acc += std::pow(t, p);
        return std::pow(acc / static_cast<double>(s_abs.size()), 1.0 / p);
    };
    const double anchor = p_norm(2.0) / result.exponents.moment_curve(2.0);
    for (double p : p_grid) {
        StoppingExperimentRow row;
        row.p = p;
        row.s_norm = p_norm(p);
        row.curve = anchor * result.exponents.moment_curve(p);
        row.dominated = row.s_norm <= row.curve * (1.0 + 1e-9);
        result.rows.push_back(row);
    }
    return result;
}

} // namespace randsum
