#include "bcls/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bcls/adapt.hpp"
#include "bcls/io.hpp"
#include "bcls/parallel.hpp"
#include "bcls/rng.hpp"
#include "bcls/simulate.hpp"

namespace bcls {

namespace {

enum Stream : std::uint64_t { kTruth = 1, kMask = 2, kNoise = 3, kFit = 4 };

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_string(TruthKind truth) { return truth == TruthKind::planted ? "planted" : "random"; }

TruthKind truth_from_string(const std::string& name) {
    if (name == "random") return TruthKind::random;
    if (name == "planted") return TruthKind::planted;
    throw std::invalid_argument("unknown truth kind '" + name + "'");
}

std::string to_string(Solver mode) { return mode == Solver::exact ? "exact" : "alternating"; }

Solver solver_from_string(const std::string& name) {
    if (name == "exact") return Solver::exact;
    if (name == "alternating") return Solver::alternating;
    throw std::invalid_argument("unknown estimator mode '" + name + "'");
}

ModelSpec spec_of(const SweepCell& cell) {
    switch (cell.scenario) {
        case Scenario::gaussian_sym: return ModelSpec::symmetric(cell.n1, cell.k1, cell.M);
        case Scenario::sbm: return ModelSpec::sbm(cell.n1, cell.k1, cell.rho);
        default: return ModelSpec::asymmetric(cell.n1, cell.n2, cell.k1, cell.k2, cell.M);
    }
}

std::pair<BiclusterAssignment, BlockValueMatrix> draw_truth(const SweepCell& cell, const ModelSpec& spec,
                                                            std::uint64_t seed) {
    if (cell.truth == TruthKind::planted) return gen_planted_model(spec, cell.gap, seed);
    return gen_random_model(spec, seed);
}

double sq_distance(const Matrix& a, const Matrix& b) {
    return restricted_sq_norm(difference(a, b), Mask(a.rows(), a.cols(), 1));
}

template <typename T>
std::vector<T> parse_list(const nlohmann::json& j, const char* key, const std::vector<T>& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

}  // namespace

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::gaussian_asym: return "gaussian-asym";
        case Scenario::gaussian_sym: return "gaussian-sym";
        case Scenario::sbm: return "sbm";
        case Scenario::graphon: return "graphon";
        case Scenario::adapt: return "adapt";
        case Scenario::unknown_p: return "unknown-p";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    for (auto s : {Scenario::gaussian_asym, Scenario::gaussian_sym, Scenario::sbm, Scenario::graphon,
                   Scenario::adapt, Scenario::unknown_p}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

bool is_symmetric(Scenario scenario) {
    return scenario == Scenario::gaussian_sym || scenario == Scenario::sbm ||
           scenario == Scenario::graphon;
}

std::string SweepCell::key() const {
    std::string out = "scenario=" + to_string(scenario);
    out += ";n1=" + std::to_string(n1) + ";n2=" + std::to_string(n2);
    out += ";k1=" + std::to_string(k1) + ";k2=" + std::to_string(k2);
    out += ";p=" + format_real(p) + ";sigma=" + format_real(sigma) + ";rho=" + format_real(rho);
    out += ";M=" + format_real(M) + ";mode=" + to_string(mode) + ";truth=" + to_string(truth);
    out += ";gap=" + format_real(gap) + ";graphon=" + to_string(graphon);
    out += ";alpha=" + format_real(alpha) + ";kmax=" + std::to_string(kmax);
    return out;
}

double scaled_loss(const SweepCell& cell, double loss) {
    double complexity;
    if (is_symmetric(cell.scenario)) {
        const double k = cell.k1;
        complexity = k * k + static_cast<double>(cell.n1) * std::log(k);
    } else {
        complexity = static_cast<double>(cell.k1) * cell.k2 +
                     static_cast<double>(cell.n1) * std::log(static_cast<double>(cell.k1)) +
                     static_cast<double>(cell.n2) * std::log(static_cast<double>(cell.k2));
    }
    return loss * cell.p / complexity;
}

void SweepConfig::validate() const {
    if (n.empty() || p.empty() || k.empty() || sigma.empty() || rho.empty()) {
        throw std::invalid_argument("sweep lists must be nonempty");
    }
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    fit.validate();
}

std::vector<SweepCell> SweepConfig::cells() const {
    validate();
    const bool gaussian = scenario != Scenario::sbm && scenario != Scenario::graphon;
    const std::vector<double> noise = gaussian ? sigma : rho;
    std::vector<SweepCell> out;
    for (std::size_t n_value : n) {
        for (int k_value : k) {
            for (double p_value : p) {
                for (double level : noise) {
                    SweepCell cell;
                    cell.scenario = scenario;
                    cell.n1 = cell.n2 = n_value;
                    cell.k1 = cell.k2 = k_value;
                    cell.p = p_value;
                    cell.M = M;
                    cell.mode = mode;
                    cell.truth = truth;
                    cell.gap = gap;
                    cell.graphon = graphon;
                    cell.alpha = alpha;
                    cell.kmax = kmax;
                    if (gaussian) {
                        cell.sigma = level;
                        cell.rho = 0.0;
                    } else {
                        cell.sigma = 0.0;
                        cell.rho = level;
                        cell.M = level;
                    }
                    if (scenario == Scenario::graphon) {
                        cell.k1 = cell.k2 = graphon_bandwidth(n_value, alpha);
                        cell.p = 1.0;
                    }
                    out.push_back(cell);
                }
            }
        }
    }
    return out;
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    SweepConfig c;
    c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    c.n = parse_list<std::size_t>(j, "n", c.n);
    c.p = parse_list<double>(j, "p", c.p);
    c.k = parse_list<int>(j, "k", c.k);
    c.sigma = parse_list<double>(j, "sigma", c.sigma);
    c.rho = parse_list<double>(j, "rho", c.rho);
    c.M = j.value("M", c.M);
    c.trials = j.value("trials", c.trials);
    c.mode = solver_from_string(j.value("mode", std::string("alternating")));
    c.fit.restarts = j.value("restarts", c.fit.restarts);
    c.fit.max_iters = j.value("max_iters", c.fit.max_iters);
    c.fit.tol = j.value("tol", c.fit.tol);
    c.fit.solver = c.mode;
    c.base_seed = j.value("base_seed", c.base_seed);
    c.truth = truth_from_string(j.value("truth", std::string("random")));
    c.gap = j.value("gap", c.gap);
    c.graphon = graphon_shape_from_string(j.value("graphon", std::string("smooth")));
    c.alpha = j.value("alpha", c.alpha);
    c.kmax = j.value("kmax", c.kmax);
    c.record_time = j.value("record_time", c.record_time);
    c.validate();
    return c;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const SweepCell& cell, int trial) {
    return mix64(base_seed ^ fnv1a(cell.key())) + static_cast<std::uint64_t>(trial);
}

TrialRecord run_trial(const SweepCell& cell, const FitConfig& fit_config, std::uint64_t seed,
                      bool record_time) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord record;
    record.cell = cell;
    record.seed = seed;

    FitConfig config = fit_config;
    config.seed = derive_seed(seed, kFit);
    config.solver = cell.mode;

    Matrix theta;
    Matrix theta_hat;
    if (cell.scenario == Scenario::graphon) {
        const GraphonSpec g{cell.graphon, cell.rho, cell.alpha, 1.0};
        const GraphonSample sample = sample_graphon_network(g, cell.n1, derive_seed(seed, kTruth));
        theta_hat = estimate_graphon(sample.x, cell.alpha, cell.rho, config);
        record.loss = graphon_mse(theta_hat, g, sample.xi);
        record.zero_loss = graphon_mse(Matrix(cell.n1, cell.n1), g, sample.xi);
        record.objective = ls_objective(sample.x.values(), theta_hat, true);
        record.k1_hat = record.k2_hat = cell.k1;
    } else {
        const ModelSpec spec = spec_of(cell);
        const bool symmetric = spec.is_symmetric();
        const auto [assignment, q] = draw_truth(cell, spec, derive_seed(seed, kTruth));
        theta = materialize_theta(assignment, q, spec);
        const Mask mask = gen_mask(spec.n1, spec.n2, cell.p, symmetric, derive_seed(seed, kMask));
        const ObservedMatrix x = cell.scenario == Scenario::sbm
                                     ? gen_bernoulli(theta, mask, true, derive_seed(seed, kNoise))
                                     : gen_gaussian(theta, cell.sigma, mask, symmetric,
                                                    derive_seed(seed, kNoise));
        record.p_hat = cell.p;
        record.k1_hat = cell.k1;
        record.k2_hat = cell.k2;
        if (cell.scenario == Scenario::adapt) {
            const KGrid grid = cell.kmax > 0 ? KGrid::range(cell.kmax, cell.kmax)
                                             : KGrid::default_for(spec.n1, spec.n2);
            AdaptConfig adapt_config;
            adapt_config.fit = config;
            const AdaptResult result = adaptive_fit(x, cell.p, cell.M, grid, adapt_config);
            theta_hat = result.theta_hat;
            record.k1_hat = result.delta.k1;
            record.k2_hat = result.delta.k2;
            record.objective = ls_objective(surrogate(x, cell.p), theta_hat, symmetric);
        } else if (cell.scenario == Scenario::unknown_p) {
            record.p_hat = estimate_p(x.mask(), symmetric);
            const FitResult f = fit_unknown_p(x, spec, config);
            theta_hat = f.theta_hat;
            record.objective = f.objective;
        } else {
            const FitResult f = fit_observed(x, cell.p, spec, config);
            theta_hat = f.theta_hat;
            record.objective = f.objective;
        }
        record.loss = sq_distance(theta_hat, theta);
        record.zero_loss = sq_distance(Matrix(theta.rows(), theta.cols()), theta);
    }

    record.scaled_loss = scaled_loss(cell, record.loss);
    if (record_time) {
        record.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return record;
}

std::vector<TrialRecord> run_sweep(const SweepConfig& config) {
    const auto cells = config.cells();
    const auto trials = static_cast<std::size_t>(config.trials);
    std::vector<TrialRecord> records(cells.size() * trials);
    parallel_for(records.size(), [&](std::size_t t) {
        const auto& cell = cells[t / trials];
        const int trial = static_cast<int>(t % trials);
        records[t] = run_trial(cell, config.fit, trial_seed(config.base_seed, cell, trial),
                               config.record_time);
    });
    return records;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
    std::string out = "scenario,n1,n2,k1,k2,p,sigma,rho,M,mode,seed,loss,scaled_loss,objective,seconds\n";
    for (const auto& r : records) {
        const auto& c = r.cell;
        out += to_string(c.scenario) + ',' + std::to_string(c.n1) + ',' + std::to_string(c.n2) + ',' +
               std::to_string(c.k1) + ',' + std::to_string(c.k2) + ',' + format_real(c.p) + ',' +
               format_real(c.sigma) + ',' + format_real(c.rho) + ',' + format_real(c.M) + ',' +
               to_string(c.mode) + ',' + std::to_string(r.seed) + ',' + format_real(r.loss) + ',' +
               format_real(r.scaled_loss) + ',' + format_real(r.objective) + ',' +
               format_real(r.seconds) + '\n';
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json rate_report(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to report");

    // Group by cell, in order of first appearance.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        const std::string key = r.cell.key();
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&r);
    }

    auto column = [](const std::vector<const TrialRecord*>& rs, double TrialRecord::*field) {
        std::vector<double> v;
        v.reserve(rs.size());
        for (const auto* r : rs) v.push_back(r->*field);
        return v;
    };

    nlohmann::json cells = nlohmann::json::array();
    nlohmann::json sparse = nlohmann::json::array();
    // Cells that differ only in p share a family key.
    std::vector<std::string> family_order;
    std::map<std::string, std::vector<std::pair<double, double>>> families;

    for (const auto& key : order) {
        const auto& rs = groups.at(key);
        const SweepCell& c = rs.front()->cell;
        const auto loss = column(rs, &TrialRecord::loss);
        const auto scaled = column(rs, &TrialRecord::scaled_loss);
        const double loss_median = quantile(loss, 0.5);
        const double zero_median = quantile(column(rs, &TrialRecord::zero_loss), 0.5);
        cells.push_back({
            {"scenario", to_string(c.scenario)},
            {"n1", c.n1}, {"n2", c.n2}, {"k1", c.k1}, {"k2", c.k2},
            {"p", c.p}, {"sigma", c.sigma}, {"rho", c.rho}, {"M", c.M},
            {"mode", to_string(c.mode)},
            {"trials", rs.size()},
            {"loss_median", loss_median},
            {"loss_q75", quantile(loss, 0.75)},
            {"scaled_loss_median", quantile(scaled, 0.5)},
            {"scaled_loss_q75", quantile(scaled, 0.75)},
            {"objective_median", quantile(column(rs, &TrialRecord::objective), 0.5)},
            {"zero_loss_median", zero_median},
        });

        if (c.scenario == Scenario::sbm) {
            const double k = c.k1;
            const double n = static_cast<double>(c.n1);
            sparse.push_back({
                {"n", c.n1}, {"k", c.k1}, {"rho", c.rho}, {"p", c.p},
                {"ls_loss_median", loss_median},
                {"zero_loss_median", zero_median},
                {"zero_estimate_better", zero_median <= loss_median},
                {"sparse_regime", c.rho < (k * k + n * std::log(k)) / (c.p * n * n)},
            });
        }

        SweepCell family = c;
        family.p = 0.0;
        const std::string family_key = family.key();
        auto [it, inserted] = families.try_emplace(family_key);
        if (inserted) family_order.push_back(family_key);
        it->second.emplace_back(c.p, loss_median);
    }

    nlohmann::json ratios = nlohmann::json::array();
    for (const auto& key : family_order) {
        const auto& points = families.at(key);
        if (points.size() < 2) continue;
        const auto reference = *std::max_element(
            points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [p, median] : points) {
            if (p == reference.first) continue;
            ratios.push_back({
                {"family", key},
                {"p", p},
                {"p_reference", reference.first},
                {"ratio", median / reference.second},
                {"theoretical_ratio", reference.first / p},
            });
        }
    }

    return {{"cells", cells}, {"p_ratios", ratios}, {"sparse_sbm", sparse}};
}

}  // namespace bcls
