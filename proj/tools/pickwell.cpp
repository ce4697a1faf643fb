// pickwell: command-line front end.
//
// Exit codes (stable):
//   0  dominates / feasible / success
//   1  violated / infeasible (witness in the report), singular denominator
//   2  undecided
//   3  not constructible (interpolate on general operator data)
//   4  usage, parse or shape errors
//   5  internal disagreement (interpolation residuals vs. domination verdict)

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pickwell/pickwell.hpp>

namespace {

using namespace pickwell;

constexpr const char* kToolVersion = "1.0.0";

enum Exit : int {
    exit_ok = 0,
    exit_violated = 1,
    exit_undecided = 2,
    exit_not_constructible = 3,
    exit_usage = 4,
    exit_disagreement = 5,
};

constexpr double kResidualLimit = 1e-8;
constexpr double kSupNormLimit = 1.0 + 1e-6;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error(errc::parse_error, "cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error(errc::parse_error, "cannot write file '" + path + "'");
    out << text;
}

json cjson(complex c) { return json::array({c.real(), c.imag()}); }

json vjson(const ComplexVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(cjson(v(i)));
    return out;
}

json mjson(const ComplexMatrix& a)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(cjson(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Human rendering: flattened "path: value" lines. Large arrays are elided, so
// every number printed here also appears in the --json rendering.
void render_human(const json& j, const std::string& path, std::ostream& out)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            render_human(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
        return;
    }
    if (j.is_array() && j.dump().size() > 80) {
        out << path << ": [" << j.size() << " entries; see --json]\n";
        return;
    }
    out << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

struct Reporter {
    json report;
    bool as_json = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Reporter(const std::vector<std::string>& argv, bool json_out)
        : as_json(json_out)
    {
        report["version"] = kFormatVersion;
        report["tool_version"] = kToolVersion;
        report["command"] = argv;
    }

    int finish(int code)
    {
        report["exit_code"] = code;
        const auto ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        report["timing_ms"] = ms;
        if (as_json)
            std::cout << report.dump(2) << "\n";
        else
            render_human(report, "", std::cout);
        return code;
    }
};

// --- check -------------------------------------------------------------------

enum class CheckMode { pick, domination, both };

struct CheckOptions {
    CheckMode mode = CheckMode::both;
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

json exact_to_json(const DominationVerdict& v, const std::vector<OperatorPoint>& points,
                   const std::vector<ComplexMatrix>& targets, const ToleranceConfig& tol)
{
    json out;
    out["status"] = to_string(v.status);
    out["spectral_radius"] = *v.spectral_radius;
    out["pick_identity_defect"] = *v.identity_defect;
    out["choi_min_eigenvalue"] = *v.choi_min_eigenvalue;
    out["choi_max_eigenvalue"] = *v.choi_max_eigenvalue;
    if (v.witness) {
        const auto check = verify_witness(points, targets, *v.witness, tol);
        json w;
        w["level"] = v.witness->level;
        w["margin"] = v.witness->margin;
        w["recheck_margin"] = check.margin;
        w["recheck_min_eigenvalue"] = check.min_eigenvalue;
        w["recheck_confirmed"] = check.confirmed;
        w["vector"] = vjson(v.witness->vector);
        w["q"] = mjson(v.witness->q);
        out["witness"] = std::move(w);
    }
    return out;
}

json randomized_to_json(const DominationVerdict& v)
{
    json out;
    out["status"] = to_string(v.status);
    out["samples"] = v.samples;
    if (v.min_sample_margin)
        out["min_margin"] = *v.min_sample_margin;
    if (v.sample_witness) {
        const auto& s = *v.sample_witness;
        json w;
        w["sample"] = s.sample;
        w["labels"] = s.labels;
        w["margin"] = s.margin;
        w["vector"] = vjson(s.vector);
        json seeds = json::array();
        for (const auto& b : s.seeds)
            seeds.push_back(mjson(b));
        w["seeds"] = std::move(seeds);
        out["witness"] = std::move(w);
    }
    if (!v.note.empty())
        out["note"] = v.note;
    return out;
}

/// Runs the requested checks, fills report["check"] and returns the exit code.
int run_check(const ProblemInstance& inst, const CheckOptions& opts, const ToleranceConfig& tol,
              json& report)
{
    json section;
    section["mode"] = opts.mode == CheckMode::pick ? "pick"
                      : opts.mode == CheckMode::domination ? "domination"
                                                            : "both";
    std::optional<Domination> exact_status;
    std::optional<Domination> random_status;

    if (inst.k == 1 && inst.d == 1) {
        std::vector<complex> z, w;
        for (std::size_t i = 0; i < inst.n(); ++i) {
            z.push_back(inst.points[i][0](0, 0));
            w.push_back(inst.targets[i](0, 0));
        }
        try {
            const auto pm = pick_matrix(z, w, tol);
            json p;
            p["min_eigenvalue"] = pm.min_eigenvalue;
            p["psd"] = pm.verdict.psd;
            p["matrix"] = mjson(pm.matrix);
            section["pick_matrix"] = std::move(p);
        } catch (const error& e) {
            section["pick_matrix"] = {{"unavailable", e.what()}};
        }
    }

    if (opts.mode != CheckMode::domination) {
        try {
            const auto v = domination_exact(inst.points, inst.targets, tol);
            section["exact"] = exact_to_json(v, inst.points, inst.targets, tol);
            exact_status = v.status;
        } catch (const error& e) {
            if (e.code() != errc::stein_singular)
                throw;
            section["exact"] = {{"status", "Unavailable"}, {"spectral_radius", e.value()},
                                {"note", "I - Phi_z is not invertible; exact route needs spectral radius < 1"}};
        }
    }

    if (opts.mode != CheckMode::pick) {
        RandomizedOptions ro;
        ro.samples = opts.samples;
        ro.seed = opts.seed;
        ro.jobs = opts.jobs;
        try {
            const auto v = domination_randomized(inst.points, inst.targets, ro, tol);
            section["randomized"] = randomized_to_json(v);
            random_status = v.status;
        } catch (const error& e) {
            if (e.code() != errc::gramian_unavailable)
                throw;
            section["randomized"] = {{"status", "Unavailable"}, {"note", e.what()}};
        }
    }

    Domination verdict = Domination::undecided;
    int code = exit_undecided;
    if (exact_status) {
        verdict = *exact_status;
        if (random_status == Domination::violated && verdict == Domination::dominates) {
            section["verdict"] = "Contradiction";
            report["check"] = std::move(section);
            return exit_disagreement;
        }
    } else if (random_status == Domination::violated) {
        verdict = Domination::violated;
    }
    code = verdict == Domination::dominates ? exit_ok
           : verdict == Domination::violated ? exit_violated
                                              : exit_undecided;
    section["verdict"] = to_string(verdict);
    report["check"] = std::move(section);
    return code;
}

ToleranceConfig effective_tol(const ProblemInstance& inst, const std::optional<double>& psd_tol)
{
    ToleranceConfig tol = inst.tolerances;
    if (psd_tol)
        tol.psd_tol = *psd_tol;
    return tol;
}

// --- interpolate -------------------------------------------------------------

json function_report(const SchurFn& f)
{
    json out;
    out["parameters"] = json::array();
    for (const auto& g : f.parameters())
        out["parameters"].push_back(cjson(g));
    out["terminal"] = cjson(f.terminal());
    out["degree"] = f.degree();
    out["sup_norm_sampled"] = sampled_sup_norm(f);
    return out;
}

/// Scalar nodes/values if the instance is scalar (d = 1, k = 1).
bool scalar_data(const ProblemInstance& inst, std::vector<complex>& z, std::vector<complex>& w)
{
    if (inst.d != 1 || inst.k != 1)
        return false;
    for (std::size_t i = 0; i < inst.n(); ++i) {
        z.push_back(inst.points[i][0](0, 0));
        w.push_back(inst.targets[i](0, 0));
    }
    return true;
}

/// Jet if the instance is a single shift point S_k with a Toeplitz target.
std::vector<complex> jet_data(const ProblemInstance& inst)
{
    if (inst.d != 1 || inst.n() != 1 || inst.points[0][0] != shift_matrix(inst.k))
        return {};
    const auto& t = inst.targets[0];
    return jet_from_toeplitz(t, 1e-14 * std::max(1.0, t.norm()));
}

int cmd_interpolate(const std::string& instance_path, const std::string& out_path, Reporter& rep)
{
    const auto inst = deserialize(read_file(instance_path));
    rep.report["instance_digest"] = digest(inst);
    const auto tol = inst.tolerances;
    std::vector<complex> z, w;
    std::optional<InterpolationResult> result;
    double max_residual = 0.0;

    if (scalar_data(inst, z, w)) {
        rep.report["route"] = "nevanlinna-pick";
        try {
            result = schur_interpolate(z, w, tol);
        } catch (const error& e) {
            rep.report["refused"] = e.what();
            return exit_not_constructible;
        }
        if (feasible(*result)) {
            const auto& f = std::get<SchurFn>(*result);
            for (std::size_t i = 0; i < z.size(); ++i)
                max_residual = std::max(max_residual, std::abs(eval_scalar(f, z[i]) - w[i]));
        } else {
            rep.report["pick_min_eigenvalue"] = pick_matrix(z, w, tol).min_eigenvalue;
        }
    } else if (auto jet = jet_data(inst); !jet.empty()) {
        rep.report["route"] = "caratheodory-fejer";
        result = caratheodory_fejer(jet, tol);
        if (feasible(*result)) {
            const auto& f = std::get<SchurFn>(*result);
            max_residual = (eval_operator(f, inst.points[0][0]) - inst.targets[0]).norm();
        } else {
            rep.report["toeplitz_norm"] = operator_norm(inst.targets[0]);
        }
    } else {
        rep.report["refused"] =
            "not constructible: interpolants are built only for scalar data (k = 1) or a single "
            "shift point with a lower-triangular Toeplitz target; use `pickwell check` to decide "
            "feasibility of general operator data";
        std::cerr << "pickwell interpolate: data is not scalar-reducible; run `pickwell check`\n";
        return exit_not_constructible;
    }

    if (!feasible(*result)) {
        const auto& inf = std::get<Infeasible>(*result);
        rep.report["status"] = "Infeasible";
        rep.report["step"] = inf.step;
        rep.report["modulus"] = inf.modulus;
        rep.report["reason"] = inf.reason;
        return exit_violated;
    }
    const auto& f = std::get<SchurFn>(*result);
    rep.report["function"] = function_report(f);
    rep.report["max_residual"] = max_residual;
    const double sup = sampled_sup_norm(f);
    if (max_residual > kResidualLimit || sup > kSupNormLimit) {
        rep.report["status"] = "ResidualCheckFailed";
        return exit_disagreement;
    }
    rep.report["status"] = "Feasible";
    if (!out_path.empty()) {
        write_file(out_path, serialize(f));
        rep.report["written"] = out_path;
    } else {
        rep.report["document"] = function_to_json(f);
    }
    return exit_ok;
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const std::string& fn_path, const std::string& matrix_path, const std::string& out_path)
{
    const auto f = deserialize_function(read_file(fn_path));
    const auto z = deserialize_matrix(read_file(matrix_path));
    OperatorValue v;
    try {
        v = eval_operator_checked(f.rational(), z);
    } catch (const error& e) {
        if (e.code() != errc::singular_denominator)
            throw;
        std::cerr << "pickwell eval: " << e.what() << "\n";
        return exit_violated;
    }
    auto doc = matrix_to_json(v.value);
    doc["residual"] = v.residual;
    doc["rcond"] = v.rcond;
    const auto text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return exit_ok;
}

// --- gen ---------------------------------------------------------------------

int cmd_gen(const std::string& mode, const std::string& points, std::size_t n, Eigen::Index k,
            std::size_t d, std::uint64_t seed, const std::string& out_path,
            const std::string& fn_path)
{
    PointMode pm;
    if (points == "interior")
        pm = PointMode::interior;
    else if (points == "nilpotent")
        pm = PointMode::nilpotent;
    else if (points == "mixed")
        pm = PointMode::mixed;
    else {
        std::cerr << "pickwell gen: --points must be interior, nilpotent or mixed\n";
        return exit_usage;
    }
    if (n == 0 || k == 0 || d == 0) {
        std::cerr << "pickwell gen: --n, --k and --d must be positive\n";
        return exit_usage;
    }
    if ((mode == "feasible" || mode == "infeasible") && d != 1) {
        std::cerr << "pickwell gen: feasible/infeasible modes use the functional calculus and need d = 1\n";
        return exit_usage;
    }
    if (pm != PointMode::interior && k == 1 && n > 1 && pm == PointMode::nilpotent) {
        std::cerr << "pickwell gen: only one nilpotent point exists for k = 1\n";
        return exit_usage;
    }

    ProblemInstance inst;
    std::optional<SchurFn> fn;
    if (mode == "feasible") {
        auto g = gen_feasible_instance(seed, n, k, pm);
        inst = std::move(g.instance);
        fn = std::move(g.function);
    } else if (mode == "infeasible") {
        inst = gen_infeasible_instance(seed, n, k, pm);
    } else if (mode == "random") {
        inst = gen_random_instance(seed, n, k, d, pm);
    } else {
        std::cerr << "pickwell gen: --mode must be feasible, infeasible or random\n";
        return exit_usage;
    }
    const auto text = serialize(inst);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    if (fn) {
        std::string path = fn_path;
        if (path.empty() && !out_path.empty())
            path = out_path + ".fn.json";
        if (!path.empty())
            write_file(path, serialize(*fn));
    }
    return exit_ok;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const std::string& instance_path, const std::string& fn_path,
               const CheckOptions& opts, Reporter& rep)
{
    const auto inst = deserialize(read_file(instance_path));
    const auto f = deserialize_function(read_file(fn_path));
    rep.report["instance_digest"] = digest(inst);
    if (inst.d != 1) {
        std::cerr << "pickwell verify: functions act on single operators; instance has d = "
                  << inst.d << "\n";
        rep.report["status"] = "ShapeMismatch";
        return exit_usage;
    }
    const auto tol = inst.tolerances;

    double max_residual = 0.0;
    try {
        for (std::size_t i = 0; i < inst.n(); ++i)
            max_residual = std::max(
                max_residual, (eval_operator(f, inst.points[i][0]) - inst.targets[i]).norm());
    } catch (const error& e) {
        if (e.code() != errc::singular_denominator)
            throw;
        rep.report["status"] = "SingularDenominator";
        return exit_violated;
    }
    const double sup = sampled_sup_norm(f);
    const double pole = min_pole_modulus(f.rational());
    const bool schur_class = sup <= kSupNormLimit && pole > 1.0;
    const bool interpolates = max_residual <= kResidualLimit;
    rep.report["function"] = function_report(f);
    rep.report["min_pole_modulus"] = std::isfinite(pole) ? json(pole) : json("inf");
    rep.report["max_residual"] = max_residual;
    rep.report["interpolates"] = interpolates;
    rep.report["schur_class"] = schur_class;

    const int check_code = run_check(inst, opts, tol, rep.report);
    if (check_code == exit_disagreement) {
        rep.report["status"] = "Disagreement";
        return exit_disagreement;
    }
    if (interpolates && schur_class) {
        if (check_code == exit_violated) {
            rep.report["status"] = "Disagreement";
            std::cerr << "pickwell verify: function interpolates but domination is violated\n";
            return exit_disagreement;
        }
        rep.report["status"] = "Verified";
        return exit_ok;
    }
    rep.report["status"] = interpolates ? "NotSchurClass" : "ResidualTooLarge";
    return exit_violated;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    if (!args.empty())
        args[0] = "pickwell";

    CLI::App app{"pickwell: operator-valued Nevanlinna-Pick feasibility and interpolation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string instance_path, fn_path, matrix_path, out_path, mode_str = "both";
    bool as_json = false;
    std::optional<double> psd_tol;
    std::size_t samples = 100;
    std::optional<std::uint64_t> seed_opt;
    unsigned jobs = 1;

    auto* check = app.add_subcommand("check", "decide domination / Pick-operator positivity");
    check->add_option("instance", instance_path, "instance document")->required();
    check->add_option("--mode", mode_str, "pick | domination | both")
        ->check(CLI::IsMember({"pick", "domination", "both"}));
    check->add_option("--tol", psd_tol, "override psd_tol");
    check->add_option("--samples", samples, "randomized Gramian samples");
    check->add_option("--seed", seed_opt, "sampling seed (default: instance seed)");
    check->add_option("--jobs", jobs, "threads for randomized sampling")->check(CLI::PositiveNumber);
    check->add_flag("--json", as_json, "machine-readable report");

    auto* interp = app.add_subcommand("interpolate", "construct a Schur-class interpolant");
    interp->add_option("instance", instance_path, "instance document")->required();
    interp->add_option("--out", out_path, "write the function document here");
    interp->add_flag("--json", as_json, "machine-readable report");

    auto* eval = app.add_subcommand("eval", "evaluate a function document at a matrix");
    eval->add_option("function", fn_path, "function document")->required();
    eval->add_option("matrix", matrix_path, "matrix document")->required();
    eval->add_option("--out", out_path, "write the result here instead of stdout");

    std::string gen_mode, gen_points = "interior";
    std::size_t gen_n = 2, gen_d = 1;
    long gen_k = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_fn;
    auto* gen = app.add_subcommand("gen", "generate an instance");
    gen->add_option("--mode", gen_mode, "feasible | infeasible | random")->required();
    gen->add_option("--points", gen_points, "interior | nilpotent | mixed");
    gen->add_option("--n", gen_n, "number of points");
    gen->add_option("--k", gen_k, "block size");
    gen->add_option("--d", gen_d, "tuple length");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", out_path, "instance output path (default stdout)");
    gen->add_option("--function-out", gen_fn,
                    "feasible mode: generating function path (default <out>.fn.json)");

    auto* verify = app.add_subcommand("verify", "check an interpolant against an instance");
    verify->add_option("instance", instance_path, "instance document")->required();
    verify->add_option("function", fn_path, "function document")->required();
    verify->add_option("--samples", samples, "randomized Gramian samples");
    verify->add_option("--seed", seed_opt, "sampling seed (default: instance seed)");
    verify->add_flag("--json", as_json, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*check) {
            Reporter rep(args, as_json);
            const auto inst = deserialize(read_file(instance_path));
            rep.report["instance_digest"] = digest(inst);
            CheckOptions opts;
            opts.mode = mode_str == "pick" ? CheckMode::pick
                        : mode_str == "domination" ? CheckMode::domination
                                                   : CheckMode::both;
            opts.samples = samples;
            opts.seed = seed_opt.value_or(inst.seed);
            opts.jobs = jobs;
            return rep.finish(run_check(inst, opts, effective_tol(inst, psd_tol), rep.report));
        }
        if (*interp) {
            Reporter rep(args, as_json);
            return rep.finish(cmd_interpolate(instance_path, out_path, rep));
        }
        if (*eval)
            return cmd_eval(fn_path, matrix_path, out_path);
        if (*gen) {
            if (gen_k <= 0) {
                std::cerr << "pickwell gen: --k must be positive\n";
                return exit_usage;
            }
            return cmd_gen(gen_mode, gen_points, gen_n, gen_k, gen_d, gen_seed, out_path, gen_fn);
        }
        if (*verify) {
            Reporter rep(args, as_json);
            CheckOptions opts;
            opts.samples = samples;
            const auto inst_text = read_file(instance_path);
            opts.seed = seed_opt.value_or(deserialize(inst_text).seed);
            return rep.finish(cmd_verify(instance_path, fn_path, opts, rep));
        }
    } catch (const error& e) {
        std::cerr << "pickwell: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "pickwell: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
