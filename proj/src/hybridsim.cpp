#include "resetfr/hybridsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>

#include "resetfr/errors.hpp"

namespace resetfr {

namespace {

constexpr double kDivergenceBound = 1e12;
constexpr double kZenoFraction = 1e-6;
// Grid samples this close (in grid steps) to an event are left out of the
// periodicity residual: the event may land on either side of them.
constexpr int kEventGuardSteps = 2;

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Augmented linear model: physical states first, then one (sin, cos)
// oscillator pair per exogenous sinusoid, so the flow is autonomous.
struct Model {
    Matrix A;
    std::array<RowVector, kSignalCount> sig;
    int n_phys = 0;
    double gamma = 1.0;
    double omega = 1.0;
    std::vector<SinusoidSpec> sources;
    Signal trigger = Signal::e_s;

    int size() const { return static_cast<int>(A.rows()); }
};

RowVector unit_row(int n, int i) {
    RowVector r = RowVector::Zero(n);
    r(i) = 1.0;
    return r;
}

// x_b' = A_b x_b + B_b * (input row . x)
void add_block(Matrix& A, int off, const StateSpace& ss, const RowVector& input) {
    const int nb = ss.states();
    if (nb == 0) return;
    A.block(off, off, nb, nb) += ss.A;
    A.middleRows(off, nb) += ss.B * input;
}

RowVector output_row(int off, const StateSpace& ss, const RowVector& input) {
    RowVector r = ss.D * input;
    r.segment(off, ss.states()) += ss.C;
    return r;
}

void add_oscillators(Model& m, int first) {
    for (std::size_t j = 0; j < m.sources.size(); ++j) {
        const int i = first + 2 * static_cast<int>(j);
        const double w = m.sources[j].multiple * m.sources[j].omega;
        m.A(i, i + 1) = w;
        m.A(i + 1, i) = -w;
    }
}

Model closed_loop_model(const ClosedLoopSystem& sys, const SinusoidSpec& input) {
    const auto& rc = sys.rc();
    const StateSpace rss = rc.base_linear();
    const StateSpace& ca = sys.c_alpha_ss();
    const StateSpace& pl = sys.plant_ss();
    const std::optional<StateSpace> sf =
        sys.shaping() ? std::optional(tf_to_ss(sys.shaping()->transfer_function())) : std::nullopt;

    const int oc = 0;
    const int oa = oc + rss.states();
    const int op = oa + ca.states();
    const int os = op + pl.states();
    const int oo = os + (sf ? sf->states() : 0);
    const int n = oo + 2;

    Model m;
    m.n_phys = oo;
    m.gamma = rc.gamma();
    m.omega = input.omega;
    m.sources = {input};
    m.A = Matrix::Zero(n, n);

    const RowVector r = unit_row(n, oo);
    RowVector y = RowVector::Zero(n);
    y.segment(op, pl.states()) = pl.C;
    const RowVector e = r - y;
    const RowVector v = output_row(oc, rss, e);
    const RowVector u = output_row(oa, ca, v);
    const RowVector es = sf ? output_row(os, *sf, e) : e;

    add_block(m.A, oc, rss, e);
    add_block(m.A, oa, ca, v);
    add_block(m.A, op, pl, u);
    if (sf) add_block(m.A, os, *sf, e);
    add_oscillators(m, oo);

    m.sig = {r, e, es, v, u, y};
    m.trigger = Signal::e_s;
    return m;
}

Model open_loop_model(const OpenLoopSetup& chain, const SinusoidSpec& input,
                      const std::optional<SinusoidSpec>& trigger) {
    const StateSpace rss = chain.rc.base_linear();
    const StateSpace ca = tf_to_ss(chain.c_alpha);
    const StateSpace pl = tf_to_ss(chain.plant);

    const int oc = 0;
    const int oa = oc + rss.states();
    const int op = oa + ca.states();
    const int oo = op + pl.states();
    const int n = oo + (trigger ? 4 : 2);

    Model m;
    m.n_phys = oo;
    m.gamma = chain.rc.gamma();
    m.omega = trigger ? trigger->omega : input.omega;
    m.sources = {input};
    if (trigger) m.sources.push_back(*trigger);
    m.A = Matrix::Zero(n, n);

    const RowVector e = unit_row(n, oo);
    const RowVector es = trigger ? unit_row(n, oo + 2) : e;
    const RowVector v = output_row(oc, rss, e);
    const RowVector u = output_row(oa, ca, v);
    const RowVector y = output_row(op, pl, u);

    add_block(m.A, oc, rss, e);
    add_block(m.A, oa, ca, v);
    add_block(m.A, op, pl, u);
    add_oscillators(m, oo);

    m.sig = {e, e, es, v, u, y};
    m.trigger = Signal::e_s;
    return m;
}

struct Sample {
    double t;
    SampleKind kind;
    Vector x;
    std::array<double, kSignalCount> sig;
};

struct Block {
    double t0 = 0.0;
    std::vector<Sample> samples;
    std::vector<EventRecord> events;
};

// Grid values of one period plus the grid phases of its events.
struct GridView {
    std::vector<std::array<double, kSignalCount>> values;
    std::vector<double> event_steps;
};

double residual_between(const GridView& a, const GridView& b) {
    const std::size_t n = std::min(a.values.size(), b.values.size());
    if (n == 0) return std::numeric_limits<double>::infinity();
    std::vector<bool> skip(n, false);
    auto mark = [&](double step) {
        const auto lo = static_cast<long>(std::floor(step)) - kEventGuardSteps;
        const auto hi = static_cast<long>(std::ceil(step)) + kEventGuardSteps;
        for (long k = lo; k <= hi; ++k) {
            const long w = ((k % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
            skip[static_cast<std::size_t>(w)] = true;
        }
    };
    for (double s : a.event_steps) mark(s);
    for (double s : b.event_steps) mark(s);

    double worst = 0.0;
    for (std::size_t c = 0; c < kSignalCount; ++c) {
        double peak = 0.0;
        double diff = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            peak = std::max({peak, std::abs(a.values[k][c]), std::abs(b.values[k][c])});
            if (!skip[k]) diff = std::max(diff, std::abs(a.values[k][c] - b.values[k][c]));
        }
        if (peak > 0.0) worst = std::max(worst, diff / peak);
    }
    return worst;
}

GridView view_of(const Block& blk, double h) {
    GridView v;
    for (const auto& s : blk.samples)
        if (s.kind == SampleKind::grid) v.values.push_back(s.sig);
    for (const auto& e : blk.events) v.event_steps.push_back((e.t - blk.t0) / h);
    return v;
}

class Engine {
public:
    Engine(Model m, const SimConfig& cfg) : m_(std::move(m)), cfg_(cfg) {
        cfg_.validate();
        for (const auto& s : m_.sources) s.validate();
        period_ = 2.0 * kPi / m_.omega;
        h_ = period_ / cfg_.samples_per_period;
        const double rho = spectral_radius(m_.A);
        substeps_ = std::max(1, static_cast<int>(std::ceil(h_ * rho / cfg_.stiffness_limit)));
        hs_ = h_ / substeps_;
        step_ = rk4(hs_);
        tol_ = cfg_.event_tol * period_;
        trig_ = m_.sig[static_cast<std::size_t>(m_.trigger)];
    }

    Trajectory run() {
        Vector x = initial_state();
        const int keep = std::max(cfg_.record_periods(), 2);
        std::deque<Block> blocks;
        int p = 0;
        double residual = std::numeric_limits<double>::infinity();
        for (;; ++p) {
            Block blk;
            blk.t0 = p * period_;
            blk.samples.reserve(static_cast<std::size_t>(cfg_.samples_per_period) + 8);
            block_ = &blk;
            for (int k = 0; k < cfg_.samples_per_period; ++k) {
                const double tk = blk.t0 + k * h_;
                const double tnext =
                    k + 1 < cfg_.samples_per_period ? blk.t0 + (k + 1) * h_ : (p + 1) * period_;
                set_oscillators(x, tk);
                if (x.head(m_.n_phys).lpNorm<Eigen::Infinity>() > kDivergenceBound)
                    throw DivergenceError("state norm exceeded 1e12 at t = " + std::to_string(tk));
                record(x, tk, SampleKind::grid);
                for (int i = 0; i < substeps_; ++i)
                    advance(x, tk + i * hs_, i + 1 < substeps_ ? tk + (i + 1) * hs_ : tnext);
            }
            blocks.push_back(std::move(blk));
            if (static_cast<int>(blocks.size()) > keep) blocks.pop_front();

            const int run = p + 1;
            if (run >= cfg_.periods) {
                // Judged over the whole kept window, which is what callers use.
                residual = 0.0;
                for (std::size_t b = 1; b < blocks.size(); ++b)
                    residual = std::max(residual, residual_between(view_of(blocks[b - 1], h_),
                                                                   view_of(blocks[b], h_)));
                if (!cfg_.extend_until_periodic || residual <= cfg_.residual_tol ||
                    run >= cfg_.max_periods)
                    break;
            }
        }
        const int run = p + 1;
        const double t_end = run * period_;
        set_oscillators(x, t_end);
        Block closing;
        block_ = &closing;
        record(x, t_end, SampleKind::grid);

        Trajectory tr;
        tr.omega = m_.omega;
        tr.samples_per_period = cfg_.samples_per_period;
        tr.gamma = m_.gamma;
        tr.periods_run = run;
        tr.record_periods = std::min(cfg_.record_periods(), static_cast<int>(blocks.size()));
        tr.t_start = (run - tr.record_periods) * period_;
        tr.residual = residual;
        const std::size_t first = blocks.size() - static_cast<std::size_t>(tr.record_periods);
        for (std::size_t b = first; b < blocks.size(); ++b) append(tr, blocks[b]);
        append(tr, closing);
        return tr;
    }

private:
    Matrix rk4(double h) const {
        const auto n = m_.A.rows();
        const Matrix I = Matrix::Identity(n, n);
        const Matrix hA = h * m_.A;
        return I + hA * (I + hA / 2.0 * (I + hA / 3.0 * (I + hA / 4.0)));
    }

    void set_oscillators(Vector& x, double t) const {
        for (std::size_t j = 0; j < m_.sources.size(); ++j) {
            const auto& s = m_.sources[j];
            const double w = s.multiple * s.omega;
            const double ph = std::fmod(w * t, 2.0 * kPi) + s.phase;
            const int i = m_.n_phys + 2 * static_cast<int>(j);
            x(i) = s.amplitude * std::sin(ph);
            x(i + 1) = s.amplitude * std::cos(ph);
        }
    }

    Vector initial_state() const {
        Vector x = Vector::Zero(m_.size());
        set_oscillators(x, 0.0);
        if (cfg_.init == InitialState::zero) return x;
        const int np = m_.n_phys;
        if (np == 0) return x;
        const Matrix app = m_.A.topLeftCorner(np, np);
        const Matrix apo = m_.A.topRightCorner(np, m_.size() - np);
        for (std::size_t j = 0; j < m_.sources.size(); ++j) {
            const auto& s = m_.sources[j];
            CVector osc = CVector::Zero(m_.size() - np);
            const Complex ph = std::polar(s.amplitude, s.phase);
            osc(2 * static_cast<int>(j)) = ph;
            osc(2 * static_cast<int>(j) + 1) = Complex(0.0, 1.0) * ph;
            const double w = s.multiple * s.omega;
            CMatrix M = Complex(0.0, w) * CMatrix::Identity(np, np) - app.cast<Complex>();
            Eigen::PartialPivLU<CMatrix> lu(M);
            if (lu.rcond() < 1e-14)
                throw SingularityError("base-linear loop has a pole on the excitation frequency");
            const CVector X = lu.solve(apo.cast<Complex>() * osc);
            x.head(np) += X.imag();
        }
        return x;
    }

    double trigger(const Vector& x) const { return trig_.dot(x); }

    void record(const Vector& x, double t, SampleKind kind) {
        Sample s{t, kind, x.head(m_.n_phys), {}};
        for (std::size_t c = 0; c < kSignalCount; ++c) s.sig[c] = m_.sig[c].dot(x);
        block_->samples.push_back(std::move(s));
    }

    // One RK4 substep of length hs_ starting at t, with event handling.
    // Event times are clamped to t_end so recorded time never runs backwards.
    void advance(Vector& x, double t, double t_end) {
        double remaining = hs_;
        bool full = true;
        for (;;) {
            Vector xn = full ? Vector(step_ * x) : Vector(rk4(remaining) * x);
            const int s = sgn(trigger(xn));
            if (last_sign_ == 0 || s != -last_sign_) {
                x = std::move(xn);
                if (s != 0) last_sign_ = s;
                return;
            }
            double lo = 0.0;
            double hi = remaining;
            while (hi - lo > tol_) {
                const double mid = 0.5 * (lo + hi);
                if (sgn(trigger(rk4(mid) * x)) == last_sign_)
                    lo = mid;
                else
                    hi = mid;
            }
            Vector xe = rk4(hi) * x;
            const double te = std::min(t + hi, t_end);
            jump(xe, te);
            const int after = sgn(trigger(xe));
            last_sign_ = after != 0 ? after : -last_sign_;
            x = std::move(xe);
            t = te;
            remaining -= hi;
            full = false;
            if (remaining <= 0.0) return;
        }
    }

    void jump(Vector& x, double t) {
        if (t - last_event_t_ < kZenoFraction * period_)
            throw ZenoError("events " + std::to_string(t - last_event_t_) +
                            " s apart, below the Zeno guard");
        last_event_t_ = t;
        EventRecord ev;
        ev.t = t;
        ev.x_pre = x.head(m_.n_phys);
        record(x, t, SampleKind::event_pre);
        x(0) *= m_.gamma;
        ev.x_post = x.head(m_.n_phys);
        ev.is_reset = m_.gamma != 1.0;
        record(x, t, SampleKind::event_post);
        block_->events.push_back(std::move(ev));
    }

    static void append(Trajectory& tr, Block& blk) {
        for (auto& s : blk.samples) {
            tr.t.push_back(s.t);
            tr.x.push_back(std::move(s.x));
            tr.kind.push_back(s.kind);
            for (std::size_t c = 0; c < kSignalCount; ++c) tr.signals[c].push_back(s.sig[c]);
        }
        for (auto& e : blk.events) tr.events.push_back(std::move(e));
    }

    Model m_;
    SimConfig cfg_;
    double period_ = 0.0;
    double h_ = 0.0;
    double hs_ = 0.0;
    int substeps_ = 1;
    Matrix step_;
    double tol_ = 0.0;
    RowVector trig_;
    int last_sign_ = 0;
    double last_event_t_ = -std::numeric_limits<double>::infinity();
    Block* block_ = nullptr;
};

}  // namespace

void SimConfig::validate() const {
    if (samples_per_period < 1000)
        throw InvalidArgument("samples_per_period must be at least 1000 (dt < period/1000)");
    if (periods < 1 || transient_periods < 0 || transient_periods >= periods)
        throw InvalidArgument("need 0 <= transient_periods < periods");
    if (!(event_tol > 0.0) || !(event_tol < 1e-3))
        throw InvalidArgument("event_tol must lie in (0, 1e-3)");
    if (!(stiffness_limit > 0.0) || !(stiffness_limit <= 1.0))
        throw InvalidArgument("stiffness_limit must lie in (0, 1]");
    if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
    if (max_periods < periods) throw InvalidArgument("max_periods must be at least periods");
}

const char* signal_name(Signal s) {
    switch (s) {
        case Signal::r: return "r";
        case Signal::e: return "e";
        case Signal::e_s: return "e_s";
        case Signal::v: return "v";
        case Signal::u: return "u";
        case Signal::y: return "y";
    }
    return "?";
}

Trajectory simulate(const ClosedLoopSystem& sys, const SinusoidSpec& input, const SimConfig& cfg) {
    if (input.multiple != 1) throw InvalidArgument("closed-loop reference must run at the base frequency");
    return Engine(closed_loop_model(sys, input), cfg).run();
}

Trajectory simulate_open(const OpenLoopSetup& chain, const SinusoidSpec& input,
                         const std::optional<SinusoidSpec>& trigger, const SimConfig& cfg) {
    if (trigger) {
        if (trigger->multiple != 1) throw InvalidArgument("trigger must run at the base frequency");
        if (trigger->omega != input.omega)
            throw InvalidArgument("input and trigger must share the base frequency");
    } else if (input.multiple != 1) {
        throw InvalidArgument("a self-triggered input must run at the base frequency");
    }
    return Engine(open_loop_model(chain, input, trigger), cfg).run();
}

namespace {

std::vector<GridView> period_views(const Trajectory& traj, double t0, int periods) {
    const double T = traj.period();
    const double h = T / traj.samples_per_period;
    std::vector<GridView> views(static_cast<std::size_t>(periods));
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.kind[i] != SampleKind::grid) continue;
        const double rel = (traj.t[i] - t0) / T;
        const long p = std::lround(std::floor(rel + 1e-9));
        if (p < 0 || p >= periods) continue;
        std::array<double, kSignalCount> v{};
        for (std::size_t c = 0; c < kSignalCount; ++c) v[c] = traj.signals[c][i];
        views[static_cast<std::size_t>(p)].values.push_back(v);
    }
    for (const auto& e : traj.events) {
        const double rel = (e.t - t0) / T;
        const long p = static_cast<long>(std::floor(rel));
        if (p < 0 || p >= periods) continue;
        views[static_cast<std::size_t>(p)].event_steps.push_back((e.t - t0 - p * T) / h);
    }
    return views;
}

}  // namespace

double periodicity_residual(const Trajectory& traj, int periods) {
    if (periods < 2) return traj.residual;
    if (periods > traj.record_periods)
        throw InvalidArgument("trajectory keeps fewer periods than requested");
    const double t0 = traj.t.back() - periods * traj.period();
    const auto views = period_views(traj, t0, periods);
    double worst = 0.0;
    for (std::size_t p = 1; p < views.size(); ++p)
        worst = std::max(worst, residual_between(views[p - 1], views[p]));
    return worst;
}

SteadyStateRecord steady_state(const Trajectory& traj, double omega, int periods,
                               double residual_tol) {
    if (traj.t.empty()) throw InvalidArgument("empty trajectory");
    if (std::abs(omega - traj.omega) > 1e-12 * traj.omega)
        throw InvalidArgument("steady-state frequency differs from the simulated one");
    if (periods < 1 || periods > traj.record_periods)
        throw InvalidArgument("trajectory keeps " + std::to_string(traj.record_periods) +
                              " periods, " + std::to_string(periods) + " requested");
    const double T = traj.period();
    SteadyStateRecord rec;
    rec.periods = periods;
    rec.t1 = traj.t.back();
    rec.t0 = rec.t1 - periods * T;
    rec.last = traj.t.size() - 1;
    const double eps = 1e-9 * T;
    rec.first = static_cast<std::size_t>(
        std::lower_bound(traj.t.begin(), traj.t.end(), rec.t0 - eps) - traj.t.begin());
    rec.residual = std::max(periodicity_residual(traj, periods), traj.residual);
    if (!(rec.residual <= residual_tol))
        throw ConvergenceError("no periodic steady state: residual " + std::to_string(rec.residual) +
                                   " after " + std::to_string(traj.periods_run) + " periods",
                               rec.residual);

    rec.resets_in_period.assign(static_cast<std::size_t>(periods), 0);
    for (const auto& e : traj.events) {
        if (!e.is_reset) continue;
        const long p = static_cast<long>(std::floor((e.t - rec.t0) / T));
        if (p >= 0 && p < periods) ++rec.resets_in_period[static_cast<std::size_t>(p)];
    }
    rec.resets_per_period = rec.resets_in_period.back();
    return rec;
}

HarmonicSpectrum harmonics(std::span<const double> t, std::span<const double> f, double omega,
                           int n_max) {
    if (t.size() != f.size() || t.size() < 2)
        throw InvalidArgument("harmonics needs matching time and value arrays");
    if (!(omega > 0.0)) throw InvalidArgument("frequency must be positive");
    if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
    const double T = 2.0 * kPi / omega;
    const double span = t.back() - t.front();
    const double k = span / T;
    if (std::round(k) < 1.0 || std::abs(k - std::round(k)) > 1e-6)
        throw InvalidArgument("harmonic window must span a whole number of periods");

    std::vector<Complex> acc(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0 && t[i] < t[i - 1]) throw InvalidArgument("time stamps must be non-decreasing");
        const double left = i > 0 ? t[i] - t[i - 1] : 0.0;
        const double right = i + 1 < t.size() ? t[i + 1] - t[i] : 0.0;
        const double w = 0.5 * (left + right) * f[i];
        if (w == 0.0) continue;
        const Complex z = std::polar(1.0, -std::fmod(omega * t[i], 2.0 * kPi));
        Complex p = 1.0;
        for (int n = 1; n <= n_max; ++n) {
            p *= z;
            acc[static_cast<std::size_t>(n)] += w * p;
        }
    }
    HarmonicSpectrum spec(omega);
    for (int n = 1; n <= n_max; ++n)
        spec.set(n, Complex(0.0, 2.0 / span) * acc[static_cast<std::size_t>(n)]);
    return spec;
}

HarmonicSpectrum harmonics(const Trajectory& traj, const SteadyStateRecord& window, Signal s,
                           int n_max) {
    const auto& sig = traj.signal(s);
    const std::size_t len = window.last - window.first + 1;
    return harmonics(std::span(traj.t).subspan(window.first, len),
                     std::span(sig).subspan(window.first, len), traj.omega, n_max);
}

std::vector<double> periodic_event_times(const Trajectory& traj) {
    std::vector<double> out;
    const double T = traj.period();
    for (const auto& e : traj.events)
        for (double shift : {-T, 0.0, T}) out.push_back(e.t + shift);
    std::sort(out.begin(), out.end());
    return out;
}

double prediction_error(std::span<const double> t_sim, std::span<const double> e_sim,
                        std::span<const double> t_pre, std::span<const double> e_pre,
                        std::span<const double> exclude_centres, double exclude_halfwidth) {
    if (t_sim.size() != e_sim.size() || t_pre.size() != e_pre.size())
        throw InvalidArgument("time and value arrays differ in length");
    if (t_sim.empty() || t_pre.empty()) throw InvalidArgument("empty signal");
    const bool same_grid = t_sim.size() == t_pre.size() &&
                           std::equal(t_sim.begin(), t_sim.end(), t_pre.begin());
    const double scale = std::max(std::abs(t_pre.front()), std::abs(t_pre.back()));
    const double eps = 1e-12 * std::max(scale, 1.0);
    if (!same_grid && (t_sim.front() < t_pre.front() - eps || t_sim.back() > t_pre.back() + eps))
        throw InvalidArgument("prediction window does not cover the simulated window");

    std::vector<double> centres(exclude_centres.begin(), exclude_centres.end());
    std::sort(centres.begin(), centres.end());
    auto excluded = [&](double t) {
        if (centres.empty() || exclude_halfwidth <= 0.0) return false;
        auto it = std::lower_bound(centres.begin(), centres.end(), t - exclude_halfwidth);
        return it != centres.end() && *it <= t + exclude_halfwidth;
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < t_sim.size(); ++i) {
        if (excluded(t_sim[i])) continue;
        double pre;
        if (same_grid) {
            pre = e_pre[i];
        } else {
            auto it = std::upper_bound(t_pre.begin(), t_pre.end(), t_sim[i]);
            if (it == t_pre.begin()) {
                pre = e_pre.front();
            } else if (it == t_pre.end()) {
                pre = e_pre.back();
            } else {
                const std::size_t j = static_cast<std::size_t>(it - t_pre.begin());
                const double ta = t_pre[j - 1];
                const double tb = t_pre[j];
                const double a = tb > ta ? (t_sim[i] - ta) / (tb - ta) : 1.0;
                pre = e_pre[j - 1] + a * (e_pre[j] - e_pre[j - 1]);
            }
        }
        worst = std::max(worst, std::abs(e_sim[i] - pre));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const SteadyStateRecord* window) {
    const std::size_t first = window ? window->first : 0;
    const std::size_t last = window ? window->last : traj.t.size() - 1;
    os << "t,r,e,e_s,v,u,y,reset_flag\n";
    char buf[64];
    for (std::size_t i = first; i <= last && i < traj.t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", traj.t[i]);
        os << buf;
        for (std::size_t c = 0; c < kSignalCount; ++c) {
            std::snprintf(buf, sizeof buf, ",%.12g", traj.signals[c][i]);
            os << buf;
        }
        const bool reset = traj.kind[i] == SampleKind::event_post && traj.gamma != 1.0;
        os << ',' << (reset ? 1 : 0) << '\n';
    }
}

}  // namespace resetfr
