// Experiment runner over the qtherm core: every study gets a subcommand that
// reads a flat key-value config section and emits a deterministic CSV table
// (optionally mirrored as JSON) for external plotting.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qtherm/cooling_coherent.hpp"
#include "qtherm/cooling_incoherent.hpp"
#include "qtherm/correlations.hpp"
#include "qtherm/spectra.hpp"

using namespace qtherm;

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw InternalError("row width does not match the header");
        rows.push_back(std::move(row));
    }
};

std::string format_cell(const Cell& cell) {
    char buf[64];
    if (std::holds_alternative<double>(cell)) {
        const double v = std::get<double>(cell);
        if (!std::isfinite(v))
            throw InternalError("refusing to emit a non-finite value");
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    if (std::holds_alternative<long long>(cell)) {
        std::snprintf(buf, sizeof buf, "%lld", std::get<long long>(cell));
        return buf;
    }
    return std::get<std::string>(cell);
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_table(const Table& table, const std::string& path, const std::string& header_comment,
                 bool json_mirror) {
    std::ostringstream csv;
    csv << "# " << header_comment << "\n";
    for (size_t c = 0; c < table.columns.size(); ++c)
        csv << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (size_t c = 0; c < row.size(); ++c)
            csv << format_cell(row[c]) << (c + 1 < row.size() ? "," : "\n");

    if (path.empty() || path == "-") {
        std::fputs(csv.str().c_str(), stdout);
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw UnsupportedError("cannot open output file: " + path);
        out << csv.str();
    }

    if (json_mirror && !path.empty() && path != "-") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : table.rows) {
            nlohmann::json obj;
            for (size_t c = 0; c < row.size(); ++c) {
                const Cell& cell = row[c];
                if (std::holds_alternative<double>(cell))
                    obj[table.columns[c]] = std::get<double>(cell);
                else if (std::holds_alternative<long long>(cell))
                    obj[table.columns[c]] = std::get<long long>(cell);
                else
                    obj[table.columns[c]] = std::get<std::string>(cell);
            }
            arr.push_back(obj);
        }
        std::ofstream out(path + ".json", std::ios::binary);
        out << arr.dump(1) << "\n";
    }
}

// Flat key-value config with one [section] per scenario.
class Config {
  public:
    static Config load(const std::string& path, const std::string& section) {
        std::ifstream in(path);
        if (!in)
            throw UnsupportedError("cannot read config file: " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        Config cfg;
        cfg.raw_ = buffer.str();

        std::istringstream lines(cfg.raw_);
        std::string line;
        std::string current;
        bool section_found = false;
        while (std::getline(lines, line)) {
            const size_t hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            line = trim(line);
            if (line.empty())
                continue;
            if (line.front() == '[' && line.back() == ']') {
                current = trim(line.substr(1, line.size() - 2));
                section_found |= current == section;
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw UnsupportedError("malformed config line: " + line);
            if (current == section)
                cfg.kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        if (!section_found)
            throw UnsupportedError("config is missing the [" + section + "] section");
        return cfg;
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            throw UnsupportedError("config is missing key: " + key);
        return it->second;
    }

    std::string get_string_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const { return parse_double(get_string(key), key); }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? std::stoll(get_string(key)) : fallback;
    }

    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::istringstream ss(get_string(key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(parse_double(item, key));
        if (out.empty())
            throw UnsupportedError("empty list for key: " + key);
        return out;
    }

    /// Grid spec: count, lo, hi.
    std::vector<double> get_grid(const std::string& key) const {
        const std::vector<double> spec = get_list(key);
        if (spec.size() != 3 || spec[0] < 1)
            throw UnsupportedError(key + " must be 'count, lo, hi'");
        const int count = static_cast<int>(spec[0]);
        std::vector<double> grid;
        for (int i = 0; i < count; ++i)
            grid.push_back(count == 1 ? spec[1]
                                      : spec[1] + (spec[2] - spec[1]) * i / (count - 1));
        return grid;
    }

    /// Hot temperature from either beta_h or t_h ("inf" accepted).
    Beta get_beta_h() const {
        if (has("beta_h"))
            return Beta(get_double("beta_h"));
        const double t_h = get_double("t_h");
        return Beta::from_temperature(t_h);
    }

    const std::string& raw() const { return raw_; }

  private:
    static double parse_double(std::string s, const std::string& key) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        if (a == std::string::npos)
            throw UnsupportedError("empty value for key: " + key);
        s = s.substr(a, b - a + 1);
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw UnsupportedError("cannot parse number '" + s + "' for key: " + key);
        return v;
    }

    std::map<std::string, std::string> kv_;
    std::string raw_;
};

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<long long> seed_override;
    long long oracle_samples = 0;
    bool json = false;
};

std::string header_for(const std::string& subcommand, const Config& cfg, long long seed) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "qtherm %s config-hash=%016llx seed=%lld", subcommand.c_str(),
                  static_cast<unsigned long long>(fnv1a(cfg.raw())), seed);
    return buf;
}

long long effective_seed(const Config& cfg, const CommonArgs& args) {
    if (args.seed_override)
        return *args.seed_override;
    return cfg.get_int_or("seed", 0);
}

std::string out_path(const Config& cfg, const CommonArgs& args) {
    if (!args.out_path.empty())
        return args.out_path;
    return cfg.get_string_or("out", "-");
}

// ---------------------------------------------------------------------------
// bound: the universal cold profile for a given system and machine.

void run_bound(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "bound");
    const Hamiltonian system(cfg.get_list("system_energies"));
    const Hamiltonian machine(cfg.get_list("machine_energies"));
    const Beta beta_r(cfg.get_double("beta_r"));
    const Vec bound = universal_bound_state(system.dim(), machine.max_energy(), beta_r);

    Table table;
    table.columns = {"level", "population", "prefix_sum"};
    const bool qubit = system.dim() == 2;
    if (qubit)
        table.columns.push_back("t_star");
    double prefix = 0.0;
    for (int k = 0; k < system.dim(); ++k) {
        prefix += bound(k);
        std::vector<Cell> row{static_cast<long long>(k), bound(k), prefix};
        if (qubit)
            row.emplace_back(system.gap() * beta_r.temperature() / machine.max_energy());
        table.add_row(std::move(row));
    }
    write_table(table, out_path(cfg, args), header_for("bound", cfg, effective_seed(cfg, args)),
                args.json);
}

// ---------------------------------------------------------------------------
// cool-coherent: protocol traces for both coherent protocols.

void run_cool_coherent(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "cool-coherent");
    const Hamiltonian system(cfg.get_list("system_energies"));
    const MachineSpec machine{Hamiltonian(cfg.get_list("machine_energies")),
                              Beta(cfg.get_double("beta_r"))};
    const double tol = cfg.get_double_or("tol", 1e-12);
    const int max_steps = static_cast<int>(cfg.get_int_or("max_steps", 1000000));
    const Vec initial = gibbs_populations(system, machine.beta_r);

    Table table;
    table.columns = {"protocol", "step", "ground_pop", "work_cumulative"};
    for (int i = 0; i < system.dim(); ++i)
        table.columns.push_back("pop_" + std::to_string(i));

    auto emit = [&](const std::string& name, const ProtocolTrace& trace) {
        for (const ProtocolStep& s : trace.steps) {
            std::vector<Cell> row{name, static_cast<long long>(s.index), s.ground_pop,
                                  s.work_cumulative};
            for (int i = 0; i < system.dim(); ++i)
                row.emplace_back(s.populations(i));
            table.add_row(std::move(row));
        }
    };
    emit("optimal", iterate_protocol(
                        [&](const Vec& s, const MachineSpec& m) {
                            return protocol_a_step_full(s, m, system);
                        },
                        initial, machine, tol, max_steps));
    emit("max-swap", iterate_protocol(
                         [&](const Vec& s, const MachineSpec& m) {
                             return protocol_b_step_full(s, m, system);
                         },
                         initial, machine, tol, max_steps));
    write_table(table, out_path(cfg, args),
                header_for("cool-coherent", cfg, effective_seed(cfg, args)), args.json);
}

// ---------------------------------------------------------------------------
// cool-incoherent: extended-machine max-swap trace, plus the two-qubit
// closed forms when the machine is the resonant qubit pair.

void run_cool_incoherent(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "cool-incoherent");
    const Hamiltonian system(cfg.get_list("system_energies"));
    const Hamiltonian machine(cfg.get_list("machine_energies"));
    const Beta beta_r(cfg.get_double("beta_r"));
    const Beta beta_h = cfg.get_beta_h();
    const double tol = cfg.get_double_or("tol", 1e-12);
    const int max_steps = static_cast<int>(cfg.get_int_or("max_steps", 1000000));

    Table table;
    table.columns = {"branch", "step", "ground_pop", "work_or_heat"};
    for (int i = 0; i < system.dim(); ++i)
        table.columns.push_back("pop_" + std::to_string(i));

    // Max-swap protocol trace on the extended machine, with the cumulative
    // free-energy cost of the heat drawn by the bridge qubits.
    MaxSwapRunner runner(system, machine, beta_r, beta_h);
    Vec sigma = gibbs_populations(system, beta_r);
    for (int step = 0; step <= max_steps; ++step) {
        std::vector<Cell> row{std::string("max-swap"), static_cast<long long>(step), sigma(0),
                              runner.total_delta_f()};
        for (int i = 0; i < system.dim(); ++i)
            row.emplace_back(sigma(i));
        table.add_row(std::move(row));
        Vec next = runner.step(sigma).populations;
        const bool done = (next - sigma).cwiseAbs().maxCoeff() < tol;
        sigma = next;
        if (done)
            break;
    }

    // Closed-form branch for the resonant two-qubit machine.
    if (system.dim() == 2 && machine.dim() == 4 && cfg.has("m1_gap") && cfg.has("m2_gap")) {
        const TwoQubitParams params{system.gap(), cfg.get_double("m1_gap"),
                                    cfg.get_double("m2_gap"), beta_r};
        const int cycles = static_cast<int>(cfg.get_int_or("cycles", 20));
        for (int n = 1; n <= cycles; ++n) {
            const IncoherentClosedForm c = two_qubit_incoherent_closed_form(params, beta_h, n);
            std::vector<Cell> row{std::string("closed-form"), static_cast<long long>(n), c.r_n,
                                  c.delta_f_n};
            row.emplace_back(c.r_n);
            row.emplace_back(1.0 - c.r_n);
            table.add_row(std::move(row));
        }
    }
    write_table(table, out_path(cfg, args),
                header_for("cool-incoherent", cfg, effective_seed(cfg, args)), args.json);
}

// ---------------------------------------------------------------------------
// sweep-figure: the parametric temperature-vs-work comparison of the two
// scenarios for the resonant two-qubit machine.

struct SweepRow {
    std::string branch;
    double parameter; // beta_h for incoherent, r_coh for coherent
    double t_over_tr;
    double delta_f;
};

std::vector<SweepRow> sweep_figure_rows(double system_gap, double m1_gap, double m2_gap,
                                        Beta beta_r, int t_points, int r_points) {
    if (std::abs(m1_gap - (system_gap + m2_gap)) > 1e-9)
        throw UnsupportedError("sweep-figure requires m1_gap = system_gap + m2_gap");
    const double t_r = beta_r.temperature();
    const double r_s = gibbs_populations(Hamiltonian::qubit(system_gap), beta_r)(0);
    const double r_m1 = gibbs_populations(Hamiltonian::qubit(m1_gap), beta_r)(0);
    const double r_m2 = gibbs_populations(Hamiltonian::qubit(m2_gap), beta_r)(0);

    std::vector<SweepRow> rows;
    // Incoherent branch: T_H from T_R to the infinite-temperature endpoint,
    // log-spaced in the Carnot offset 1 - beta_h/beta_r so the steep
    // small-work region near T_R is resolved.
    for (int i = 0; i <= t_points; ++i) {
        double offset = 0.0;
        if (i > 0)
            offset = std::pow(10.0, -6.0 * (1.0 - (i - 1.0) / (t_points - 1.0)));
        const Beta beta_h(beta_r.value() * (1.0 - offset));
        const double r_m2_hot =
            gibbs_populations(Hamiltonian::qubit(m2_gap), beta_h)(0);
        const double r = r_s * r_m1 + ((1 - r_s) * r_m1 + r_s * (1 - r_m1)) * (1 - r_m2_hot);
        const double t = qubit_temperature_from_ground_pop(system_gap, r);
        const double df =
            m2_gap * (r_m2 - r_m2_hot) * (1.0 - beta_h.value() / beta_r.value());
        rows.push_back({"incoherent", beta_h.value(), t / t_r, df});
    }
    // Coherent branch: targets from r_S to the single-cycle optimum r_M1.
    for (int i = 0; i < r_points; ++i) {
        const double r = r_s + (r_m1 - r_s) * i / (r_points - 1.0);
        const TwoQubitSchedule sol = two_qubit_optimal(system_gap, m1_gap, m2_gap, beta_r, r);
        const double t = r == r_s ? t_r : qubit_temperature_from_ground_pop(system_gap, r);
        rows.push_back({"coherent", r, t / t_r, sol.delta_f});
    }
    return rows;
}

void verify_sweep(const std::vector<SweepRow>& rows) {
    // Endpoint ordering and the existence of a critical work cost where the
    // branches cross.
    double t_inc_end = 0, df_inc_end = 0, t_coh_end = 0, df_coh_end = 0;
    std::vector<std::pair<double, double>> inc, coh; // (delta_f, t)
    for (const SweepRow& r : rows) {
        if (r.branch == "incoherent") {
            inc.emplace_back(r.delta_f, r.t_over_tr);
            t_inc_end = r.t_over_tr;
            df_inc_end = r.delta_f;
        } else {
            coh.emplace_back(r.delta_f, r.t_over_tr);
            t_coh_end = r.t_over_tr;
            df_coh_end = r.delta_f;
        }
    }
    if (!(t_coh_end < t_inc_end && df_coh_end < df_inc_end))
        throw InternalError("coherent endpoint does not dominate the incoherent one");

    auto interpolate = [](const std::vector<std::pair<double, double>>& curve, double df) {
        for (size_t i = 1; i < curve.size(); ++i) {
            if ((curve[i - 1].first <= df && df <= curve[i].first) ||
                (curve[i].first <= df && df <= curve[i - 1].first)) {
                const double span = curve[i].first - curve[i - 1].first;
                const double w = span == 0 ? 0.0 : (df - curve[i - 1].first) / span;
                return curve[i - 1].second + w * (curve[i].second - curve[i - 1].second);
            }
        }
        return curve.back().second;
    };
    const double df_hi = std::min(df_inc_end, df_coh_end);
    bool sign_change = false;
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double df = df_hi * i / 200.0;
        const double gap = interpolate(inc, df) - interpolate(coh, df);
        if (i > 1 && gap * prev < 0)
            sign_change = true;
        prev = gap;
    }
    if (!sign_change)
        throw InternalError("no critical work cost crossing between the branches");
}

void run_sweep_figure(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "sweep-figure");
    const double system_gap = cfg.get_double("system_gap");
    const double m2_gap = cfg.get_double("m2_gap");
    const double m1_gap = cfg.get_double_or("m1_gap", system_gap + m2_gap);
    const Beta beta_r(cfg.get_double("beta_r"));
    const int t_points = static_cast<int>(cfg.get_int_or("t_h_points", 40));
    const int r_points = static_cast<int>(cfg.get_int_or("r_points", 40));

    const std::vector<SweepRow> rows =
        sweep_figure_rows(system_gap, m1_gap, m2_gap, beta_r, t_points, r_points);
    verify_sweep(rows);

    Table table;
    table.columns = {"branch", "parameter", "t_over_tr", "delta_f"};
    for (const SweepRow& r : rows)
        table.add_row({r.branch, r.parameter, r.t_over_tr, r.delta_f});
    write_table(table, out_path(cfg, args),
                header_for("sweep-figure", cfg, effective_seed(cfg, args)), args.json);
}

// ---------------------------------------------------------------------------
// correlate / stu / oracle: the Part II studies.

std::vector<std::pair<std::string, StuCertificate>> stu_all_approaches(const Hamiltonian& h,
                                                                       Beta beta_r, Beta bp) {
    std::vector<std::pair<std::string, StuCertificate>> out;
    const int d = h.dim();
    if (d == 3)
        out.emplace_back("majorized-marginal", stu_d3_majorized_marginal(h, beta_r, bp));
    bool passing_ok = d == 2 || d == 3;
    if (d == 4) {
        passing_ok = true;
        for (int i = 0; i + 2 < d; ++i)
            if (h.energy(i + 2) - h.energy(i + 1) > h.energy(i + 1) - h.energy(i) + 1e-12)
                passing_ok = false;
        if (!passing_ok)
            std::fprintf(stderr,
                         "note: increasing gaps at d=4, rerouting to the geometric route only\n");
    }
    if (passing_ok)
        out.emplace_back("passing-norm", stu_passing_norm(h, beta_r, bp));
    if (d == 3 || d == 4)
        out.emplace_back("geometric", stu_geometric(h, beta_r, bp));
    if (out.empty())
        throw UnsupportedError("no construction available for this dimension");
    return out;
}

void run_correlate(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "correlate");
    const Hamiltonian h(cfg.get_list("hamiltonian"));
    const Beta beta_r(cfg.get_double("beta_r"));
    if (h.dim() < 2 || h.dim() > 4)
        throw UnsupportedError("correlate construction supports d in {2, 3, 4}");
    const std::vector<double> grid = cfg.get_grid("beta_prime_grid");
    const long long seed = effective_seed(cfg, args);
    const long long oracle_samples =
        args.oracle_samples > 0 ? args.oracle_samples : cfg.get_int_or("oracle_samples", 0);

    const double initial_entropy = 2.0 * shannon_entropy(gibbs_populations(h, beta_r));

    Table table;
    table.columns = {"beta_prime", "energy",   "jaynes_bound", "approach",
                     "residual",   "info_sum", "info_gain"};
    if (oracle_samples > 0)
        table.columns.push_back("oracle_best");

    for (double bp : grid) {
        if (bp > beta_r.value())
            throw UnsupportedError("beta_prime grid must stay at or below beta_r");
        const Vec target = gibbs_populations(h, Beta(bp));
        const double c = 2.0 * average_energy(target, h);
        const JaynesBound bound = jaynes_bound(h, h, beta_r, c);
        std::optional<double> oracle_best;
        if (oracle_samples > 0) {
            const OracleResult orc = brute_force_max_correlations(
                h, h, beta_r, c, static_cast<int>(oracle_samples),
                static_cast<std::uint64_t>(seed));
            oracle_best = orc.best_info;
        }
        for (const auto& [name, cert] : stu_all_approaches(h, beta_r, Beta(bp))) {
            // Achieved marginal entropy sum, against the Jaynes ceiling, and
            // the mutual-information gain over the initial product state.
            const double info_sum = 2.0 * shannon_entropy(cert.achieved_marginal);
            std::vector<Cell> row{bp,   c,        bound.bound,
                                  name, cert.residual, info_sum,
                                  info_sum - initial_entropy};
            if (oracle_samples > 0)
                row.emplace_back(*oracle_best);
            table.add_row(std::move(row));
        }
    }
    write_table(table, out_path(cfg, args), header_for("correlate", cfg, seed), args.json);
}

void run_stu(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "stu");
    const Hamiltonian h(cfg.get_list("hamiltonian"));
    const Beta beta_r(cfg.get_double("beta_r"));
    const std::vector<double> grid = cfg.get_grid("beta_prime_grid");

    Table table;
    table.columns = {"beta_prime", "approach", "residual", "marginal_err", "mutual_info"};
    for (int i = 0; i < h.dim(); ++i)
        table.columns.push_back("marginal_" + std::to_string(i));

    const BlockDecomposition blocks = latin_blocks(h, beta_r);
    const Vec p = gibbs_populations(h, beta_r);
    const Mat rho0 = diagonal_state(tensor_diag(p, p));
    for (double bp : grid) {
        const Vec target = gibbs_populations(h, Beta(bp));
        for (const auto& [name, cert] : stu_all_approaches(h, beta_r, Beta(bp))) {
            const Mat u = build_stu_unitary(cert, blocks);
            const Mat rho = apply_unitary(rho0, u);
            const JointIndex idx{h.dim(), h.dim()};
            const Vec marginal = diag_of(partial_trace(rho, idx, Side::Left));
            std::vector<Cell> row{bp, name, cert.residual,
                                  (marginal - target).cwiseAbs().maxCoeff(),
                                  mutual_information(rho, idx)};
            for (int i = 0; i < h.dim(); ++i)
                row.emplace_back(marginal(i));
            table.add_row(std::move(row));
        }
    }
    write_table(table, out_path(cfg, args), header_for("stu", cfg, effective_seed(cfg, args)),
                args.json);
}

void run_oracle(const CommonArgs& args) {
    const Config cfg = Config::load(args.config_path, "oracle");
    const Hamiltonian h_a(cfg.get_list("hamiltonian_a"));
    const Hamiltonian h_b(cfg.get_list("hamiltonian_b"));
    const Beta beta_r(cfg.get_double("beta_r"));
    const std::vector<double> budgets = cfg.get_grid("c_grid");
    const long long seed = effective_seed(cfg, args);
    const long long samples =
        args.oracle_samples > 0 ? args.oracle_samples : cfg.get_int_or("samples", 2000);

    Table table;
    table.columns = {"c",          "best_info", "best_energy",
                     "jaynes_gap", "samples",   "descent_improvements"};
    for (double c : budgets) {
        const OracleResult orc = brute_force_max_correlations(
            h_a, h_b, beta_r, c, static_cast<int>(samples), static_cast<std::uint64_t>(seed));
        const JaynesBound bound = jaynes_bound(h_a, h_b, beta_r, c);
        const double initial = shannon_entropy(gibbs_populations(h_a, beta_r)) +
                               shannon_entropy(gibbs_populations(h_b, beta_r));
        table.add_row({c, orc.best_info, orc.best_energy, bound.bound - initial - orc.best_info,
                       static_cast<long long>(orc.samples_used),
                       static_cast<long long>(orc.descent_improvements)});
    }
    write_table(table, out_path(cfg, args), header_for("oracle", cfg, seed), args.json);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum refrigeration and correlation studies"};
    app.require_subcommand(1);

    CommonArgs args;
    long long seed_flag = -1;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "config file")->required();
        cmd->add_option("--out", args.out_path, "output CSV path (default from config)");
        cmd->add_option("--seed", seed_flag, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--oracle-samples", args.oracle_samples, "sample budget for the oracle");
        cmd->add_flag("--json", args.json, "also write a JSON mirror next to the CSV");
    };

    std::map<std::string, void (*)(const CommonArgs&)> runners{
        {"bound", run_bound},
        {"cool-coherent", run_cool_coherent},
        {"cool-incoherent", run_cool_incoherent},
        {"sweep-figure", run_sweep_figure},
        {"correlate", run_correlate},
        {"stu", run_stu},
        {"oracle", run_oracle},
    };
    for (auto& [name, fn] : runners)
        add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed_set)
            args.seed_override = seed_flag;
        for (auto& [name, fn] : runners)
            if (app.got_subcommand(name))
                fn(args);
        return 0;
    } catch (const UnsupportedError& e) {
        std::fprintf(stderr, "unsupported configuration: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const InternalError& e) {
        std::fprintf(stderr, "internal consistency failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
