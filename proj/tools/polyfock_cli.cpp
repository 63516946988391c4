// Command-line front door: ingest a problem configuration, run the
// requested verification, and emit a deterministic JSON (or CSV) report.
//
// Exit codes: 0 all declared checks pass, 1 a check failed, 2 input error,
// 3 resource guard tripped.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "polyfock/berezin.hpp"
#include "polyfock/io.hpp"
#include "polyfock/modeltheory.hpp"
#include "polyfock/rkhs.hpp"

using namespace polyfock;
using polyfock::io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliOptions {
    std::string command;
    std::string configPath;
    std::string gridOverride;
    double radial = -1.0;
    int jobs = 1;
    std::uint64_t seed = 1;
    std::string outPath;
    std::string exportPath;
    std::string format = "json";
    bool timing = false;
    double dimensionGuard = 2e5;
};

struct Problem {
    Json config;
    DomainSpec spec;
    TruncationGrid grid;
    IdealSpec ideal;
    std::optional<OperatorTuple> tuple;
    std::vector<ScalarPoint> points;
    Tolerances tol;
    std::uint64_t seed = 1;
};

Problem load_problem(const CliOptions& opts) {
    std::ifstream in(opts.configPath);
    if (!in) throw std::invalid_argument("cannot open config file: " + opts.configPath);
    Json config;
    try {
        config = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }

    DomainSpec spec = io::domain_from_json(config.at("domain"));
    TruncationGrid grid =
        opts.gridOverride.empty()
            ? io::grid_from_json(config.at("grid"))
            : TruncationGrid([&] {
                  std::vector<int> caps;
                  std::stringstream ss(opts.gridOverride);
                  for (std::string tok; std::getline(ss, tok, ',');)
                      caps.push_back(std::stoi(tok));
                  return caps;
              }());

    Problem problem{std::move(config), std::move(spec), std::move(grid), IdealSpec::zero(),
                    {}, {}, {}, opts.seed};
    if (problem.config.contains("ideal"))
        problem.ideal = io::ideal_from_json(problem.config.at("ideal"), problem.spec);
    if (problem.config.contains("tolerances")) {
        const auto& t = problem.config.at("tolerances");
        problem.tol.psdTol = t.value("psd", problem.tol.psdTol);
        problem.tol.commTol = t.value("commutator", problem.tol.commTol);
        problem.tol.rankTol = t.value("rank", problem.tol.rankTol);
        if (problem.tol.psdTol <= 0 || problem.tol.commTol <= 0 || problem.tol.rankTol <= 0)
            throw std::invalid_argument("tolerances must be positive");
    }
    if (problem.config.contains("seed"))
        problem.seed = problem.config.at("seed").get<std::uint64_t>();
    if (problem.config.contains("tuple"))
        problem.tuple = io::tuple_from_json(problem.config.at("tuple"), problem.tol.commTol);
    if (problem.config.contains("points"))
        for (const auto& p : problem.config.at("points"))
            problem.points.push_back(io::point_from_json(p));

    fock_dimension(problem.spec, problem.grid, static_cast<Index>(opts.dimensionGuard));
    return problem;
}

struct CheckRow {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    Json extra;
};

Json row_json(const CheckRow& row) {
    Json j{{"name", row.name},
           {"pass", row.pass},
           {"value", row.value},
           {"tolerance", row.tolerance}};
    if (!row.extra.is_null()) j["detail"] = row.extra;
    return j;
}

const OperatorTuple& require_tuple(const Problem& p) {
    if (!p.tuple) throw std::invalid_argument("this command needs a \"tuple\" entry");
    return *p.tuple;
}

std::vector<CheckRow> run_check_domain(const Problem& p) {
    const auto report = check_membership(p.spec, require_tuple(p), p.tol);
    std::vector<CheckRow> rows;
    Json eigens = Json::array();
    for (const auto& [lattice, eig] : report.minEigen)
        eigens.push_back(Json{{"p", lattice}, {"min_eigenvalue", eig}});
    rows.push_back({"membership", report.isMember, report.worstEigen(), p.tol.psdTol,
                    Json{{"lattice", eigens},
                         {"defect_rank", report.defectRank},
                         {"pure", report.purity == Purity::Pure
                                      ? "yes"
                                      : (report.purity == Purity::NotPure ? "no"
                                                                          : "unknown")}}});
    rows.push_back({"cross_block_commutation", report.commutatorDefect <= p.tol.commTol,
                    report.commutatorDefect, p.tol.commTol, {}});
    return rows;
}

// basis manifest plus operator triplets for the constrained model
Json export_model(const VarietyModel& model) {
    Json ops = Json::array();
    for (int i = 1; i <= model.ambient.block_count(); ++i)
        for (int j = 1; j <= model.ambient.basis.spec().n[static_cast<std::size_t>(i - 1)];
             ++j)
            ops.push_back(Json{{"block", i},
                               {"letter", j},
                               {"matrix", io::triplets_json(model.op(i, j), 1e-15)}});
    return Json{{"manifest", io::basis_manifest(model.ambient.basis)},
                {"quotient_basis", io::triplets_json(model.basisN, 1e-15)},
                {"operators", std::move(ops)}};
}

std::vector<CheckRow> run_build_model(const Problem& p, std::string exportPath = {}) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    auto report = verify_model(model, p.tol);
    if (!exportPath.empty()) {
        std::ofstream out(exportPath);
        out << export_model(model).dump(2) << '\n';
    }
    std::vector<CheckRow> rows;
    rows.push_back({"model_dimension", true, static_cast<double>(model.dimN()), 0.0,
                    Json{{"ambient_dimension", model.ambient_dim()},
                         {"vacuum_in_N", model.vacuumInN},
                         {"graded", model.graded}}});
    rows.push_back({"generator_annihilation", report.maxGeneratorResidual <= 1e-10,
                    report.maxGeneratorResidual, 1e-10, {}});
    rows.push_back({"rank_one_defect_interior", report.interiorDefectResidual <= 1e-10,
                    report.interiorDefectResidual, 1e-10,
                    Json{{"full_residual", report.defectResidual}}});
    rows.push_back({"purity", report.purity == Purity::Pure,
                    report.purity == Purity::Pure ? 0.0 : 1.0, 0.0, {}});
    if (report.leakageNorm > 0.0)
        rows.push_back({"truncation_leakage", true, report.leakageNorm, 0.0,
                        Json{{"note", "non-homogeneous generators leak past the caps"}}});
    return rows;
}

std::vector<CheckRow> run_berezin(const Problem& p, double radial,
                                  std::string exportPath = {}) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    const OperatorTuple& t = require_tuple(p);
    const OperatorTuple scaled = radial >= 0.0 ? scale_tuple(t, radial) : t;
    auto kernel = berezin_kernel(model, scaled, p.tol);
    if (!exportPath.empty()) {
        std::ofstream out(exportPath);
        out << Json{{"manifest", io::basis_manifest(model.ambient.basis)},
                    {"kernel", io::triplets_json(kernel.K, 1e-15)},
                    {"defect_root", io::triplets_json(kernel.defectRoot, 1e-15)}}
                   .dump(2)
            << '\n';
    }

    std::vector<CheckRow> rows;
    const bool exact = kernel.truncationResidual <= 1e-12;
    rows.push_back({"kernel_contraction", kernel.K.operatorNorm() <= 1.0 + 1e-10,
                    kernel.K.operatorNorm(), 1.0 + 1e-10,
                    Json{{"defect_rank", kernel.defectRank},
                         {"truncation_residual", kernel.truncationResidual}}});
    const double intertwining = verify_intertwining(kernel, model, scaled);
    rows.push_back({"intertwining", !exact || intertwining <= 1e-10, intertwining,
                    exact ? 1e-10 : kernel.truncationResidual, {}});
    const Mat gram = kernel.K.adjoint() * kernel.K;
    const double isoResidual = (gram - Mat::Identity(gram.rows(), gram.cols())).norm();
    const bool pure = check_purity(p.spec, scaled) == Purity::Pure;
    rows.push_back({"isometry_when_pure", !(pure && exact) || isoResidual <= 1e-10,
                    isoResidual, 1e-10, Json{{"pure", pure}}});
    const double rangeDefect = kernel_range_defect(model, scaled, p.tol);
    rows.push_back({"range_in_N", !exact || rangeDefect <= 1e-10, rangeDefect, 1e-10, {}});
    return rows;
}

std::vector<CheckRow> run_kernel_eval(const Problem& p) {
    if (p.points.empty()) throw std::invalid_argument("kernel-eval needs a \"points\" list");
    auto gram = gram_matrix(p.spec, p.points);
    std::vector<CheckRow> rows;
    const double floor = -p.tol.psdTol * (1.0 + gram.gram.norm());
    rows.push_back({"gram_psd", gram.minEigenvalue >= floor, gram.minEigenvalue, floor,
                    Json{{"gram", io::to_json(gram.gram)}}});

    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    Json table = Json::array();
    bool allStrict = true;
    for (const auto& pt : p.points) {
        if (!is_strict(p.spec, pt)) {
            allStrict = false;
            continue;
        }
        Json entry = io::to_json(pt);
        try {
            auto residuals = verify_eigen(model, pt, p.tol);
            double worstGap = 0.0;
            for (const auto& r : residuals)
                worstGap = std::max(worstGap, std::abs(r.residual - r.closedForm));
            entry["eigen_residual_gap"] = worstGap;
            entry["delta1"] = scalar_defect(p.spec, pt);
        } catch (const std::invalid_argument& e) {
            entry["skipped"] = e.what();
        }
        table.push_back(std::move(entry));
    }
    rows.push_back({"points_strict", allStrict, allStrict ? 1.0 : 0.0, 0.0,
                    Json{{"evaluations", table}}});
    return rows;
}

std::vector<CheckRow> run_beurling(const Problem& p) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    if (!p.config.contains("subspace"))
        throw std::invalid_argument("beurling needs a \"subspace\" basis matrix");
    const Mat basis = io::mat_from_json(p.config.at("subspace"));
    const Eigen::Index slots = p.config.value("slots", 1);
    auto report = beurling_criterion(model, basis, slots, p.tol);

    std::vector<CheckRow> rows;
    Json eigens = Json::array();
    double worst = 0.0;
    for (const auto& [lattice, eig] : report.minEigen) {
        eigens.push_back(Json{{"p", lattice}, {"min_eigenvalue", eig}});
        worst = std::min(worst, eig);
    }
    rows.push_back({"beurling_criterion", report.satisfied, worst, p.tol.psdTol,
                    Json{{"lattice", eigens},
                         {"invariance_residual", report.invarianceResidual}}});
    if (report.satisfied) {
        auto fact = factorize_psd(model, Mat(basis * basis.adjoint()), slots, p.tol);
        const auto& f = std::get<Factorization>(fact);
        rows.push_back({"factorization", f.factorResidual <= 1e-8, f.factorResidual, 1e-8,
                        Json{{"intertwining_residual", f.gamma.intertwiningResidual}}});
    }
    return rows;
}

std::vector<CheckRow> run_char_fn(const Problem& p) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    auto data = characteristic_function(model, require_tuple(p), p.tol);
    std::vector<CheckRow> rows;
    if (!data.existsFlag) {
        rows.push_back(
            {"existence", false, 0.0, 0.0, Json{{"violating_p", data.violatingP}}});
        return rows;
    }
    rows.push_back({"existence", true, 1.0, 0.0,
                    Json{{"defect_rank", data.kernel.defectRank},
                         {"dual_defect_rank", data.dualDefectRange.cols()}}});
    rows.push_back({"unit_identity", data.unitIdentityResidual <= 1e-9,
                    data.unitIdentityResidual, 1e-9, {}});
    rows.push_back({"multi_analytic", data.theta.intertwiningResidual <= 1e-9,
                    data.theta.intertwiningResidual, 1e-9, {}});
    const Mat gram = data.theta.M.adjoint() * data.theta.M;
    const double inner = (gram * gram - gram).norm();
    const bool pure = check_purity(p.spec, require_tuple(p)) == Purity::Pure;
    rows.push_back(
        {"inner_when_pure", !pure || inner <= 1e-8, inner, 1e-8, Json{{"pure", pure}}});
    return rows;
}

std::vector<CheckRow> run_dilate(const Problem& p) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    auto dil = dilate(model, require_tuple(p), p.tol);
    std::vector<CheckRow> rows;
    rows.push_back({"isometry", dil.isometryResidual <= 1e-10, dil.isometryResidual, 1e-10,
                    Json{{"dilation_index", dil.dilationIndex},
                         {"boundary_dimension", dil.boundaryDim}}});
    rows.push_back({"co_invariance", dil.coInvarianceResidual <= 1e-9,
                    dil.coInvarianceResidual, 1e-9, {}});
    if (dil.boundaryDim > 0) {
        rows.push_back(
            {"boundary_defect", dil.boundaryDefect <= 1e-9, dil.boundaryDefect, 1e-9, {}});
        rows.push_back({"boundary_in_variety", dil.boundaryIdealResidual <= 1e-9,
                        dil.boundaryIdealResidual, 1e-9, {}});
    } else {
        rows.push_back({"minimality", dil.minimal, dil.minimal ? 1.0 : 0.0, 0.0, {}});
    }
    return rows;
}

std::vector<CheckRow> run_wold(const Problem& p) {
    auto wold = wold_decompose(p.spec, require_tuple(p), p.tol);
    std::vector<CheckRow> rows;
    rows.push_back({"k0_reduces", wold.reducingResidual <= 1e-9, wold.reducingResidual, 1e-9,
                    Json{{"multiplicity", wold.multiplicity},
                         {"k0_dimension", wold.k0Basis.cols()}}});
    rows.push_back({"complement_degenerate", wold.complementDefect <= 1e-9,
                    wold.complementDefect, 1e-9, {}});
    return rows;
}

std::vector<CheckRow> run_coincide(const Problem& p) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);
    if (!p.config.contains("tuple_b"))
        throw std::invalid_argument("coincide needs \"tuple\" and \"tuple_b\"");
    auto dataA = characteristic_function(model, require_tuple(p), p.tol);
    auto dataB = characteristic_function(
        model, io::tuple_from_json(p.config.at("tuple_b"), p.tol.commTol), p.tol);
    std::vector<CheckRow> rows;
    if (!dataA.existsFlag || !dataB.existsFlag) {
        rows.push_back({"existence", false, 0.0, 0.0, {}});
        return rows;
    }
    auto res = coincidence_check(model, dataA.theta, dataB.theta, p.seed, p.tol);
    rows.push_back({"coincidence", true, res.residual, 1e-8,
                    Json{{"coincide", res.coincide},
                         {"reason", res.reason.empty() ? Json() : Json(res.reason)}}});
    return rows;
}

std::vector<CheckRow> run_verify_all(const Problem& p, int jobs) {
    auto model = build_variety_model(p.spec, p.grid, p.ideal, p.tol);

    std::vector<std::function<std::vector<CheckRow>()>> tasks;
    tasks.push_back([&p] { return run_build_model(p); });
    tasks.push_back([&p, &model]() -> std::vector<CheckRow> {
        // the model itself is a member, pure, with an isometric kernel
        OperatorTuple s = model.tuple();
        auto membership = check_membership(p.spec, s, p.tol);
        auto kernel = berezin_kernel(model, s, p.tol);
        const Mat gram = kernel.K.adjoint() * kernel.K;
        const double iso = (gram - Mat::Identity(gram.rows(), gram.cols())).norm();
        return {{"model_membership", membership.isMember, membership.worstEigen(),
                 p.tol.psdTol, {}},
                {"model_kernel_isometry", iso <= 1e-10, iso, 1e-10, {}}};
    });
    if (p.tuple) {
        tasks.push_back([&p] { return run_check_domain(p); });
        tasks.push_back([&p] { return run_berezin(p, -1.0); });
        tasks.push_back([&p] { return run_char_fn(p); });
        tasks.push_back([&p] { return run_dilate(p); });
    }
    if (!p.points.empty()) tasks.push_back([&p] { return run_kernel_eval(p); });

    std::vector<std::vector<CheckRow>> results(tasks.size());
    if (jobs > 1) {
        std::vector<std::future<std::vector<CheckRow>>> futures;
        futures.reserve(tasks.size());
        for (auto& task : tasks) futures.push_back(std::async(std::launch::async, task));
        for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
    }
    std::vector<CheckRow> rows;
    for (auto& chunk : results)
        for (auto& row : chunk) rows.push_back(std::move(row));
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polydomain variety verification toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    const std::vector<std::string> commands = {"check-domain", "build-model", "berezin",
                                               "kernel-eval",  "beurling",    "char-fn",
                                               "dilate",       "wold",        "coincide",
                                               "verify-all"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.configPath, "problem configuration (JSON)")
            ->required();
        sub->add_option("--grid", opts.gridOverride, "override caps, e.g. 3,3");
        sub->add_option("--r", opts.radial, "radial parameter in [0,1)");
        sub->add_option("--jobs", opts.jobs, "parallel fixtures");
        sub->add_option("--seed", opts.seed, "seed for randomized searches");
        sub->add_option("--out", opts.outPath, "write the report here instead of stdout");
        sub->add_option("--export", opts.exportPath,
                        "write basis manifest and operator/kernel triplets here");
        sub->add_option("--format", opts.format, "json or csv");
        sub->add_option("--dimension-guard", opts.dimensionGuard,
                        "refuse larger truncated dimensions");
        sub->add_flag("--timing", opts.timing, "include wall time in the report");
        sub->callback([&opts, name] { opts.command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    const auto started = std::chrono::steady_clock::now();
    Json report;
    int exitCode = 0;
    try {
        Problem problem = load_problem(opts);
        std::vector<CheckRow> rows;
        if (opts.command == "check-domain") rows = run_check_domain(problem);
        else if (opts.command == "build-model")
            rows = run_build_model(problem, opts.exportPath);
        else if (opts.command == "berezin")
            rows = run_berezin(problem, opts.radial, opts.exportPath);
        else if (opts.command == "kernel-eval") rows = run_kernel_eval(problem);
        else if (opts.command == "beurling") rows = run_beurling(problem);
        else if (opts.command == "char-fn") rows = run_char_fn(problem);
        else if (opts.command == "dilate") rows = run_dilate(problem);
        else if (opts.command == "wold") rows = run_wold(problem);
        else if (opts.command == "coincide") rows = run_coincide(problem);
        else if (opts.command == "verify-all") rows = run_verify_all(problem, opts.jobs);

        bool allPass = true;
        Json checks = Json::array();
        for (const auto& row : rows) {
            checks.push_back(row_json(row));
            allPass = allPass && row.pass;
        }
        report = Json{{"command", opts.command},
                      {"config_hash", io::config_hash(problem.config)},
                      {"seed", problem.seed},
                      {"version", kVersion},
                      {"checks", std::move(checks)},
                      {"pass", allPass}};
        if (!allPass) exitCode = 1;
    } catch (const std::invalid_argument& e) {
        report = Json{{"command", opts.command}, {"error", e.what()}};
        exitCode = 2;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        report = Json{{"command", opts.command}, {"error", what}};
        exitCode = what.find("exceeds the guard") != std::string::npos ? 3 : 2;
    }

    if (opts.timing)
        report["runtime_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();

    std::string payload;
    if (opts.format == "csv") {
        std::ostringstream csv;
        csv << "name,pass,value,tolerance\n";
        if (report.contains("checks"))
            for (const auto& c : report.at("checks"))
                csv << c.at("name").get<std::string>() << ','
                    << (c.at("pass").get<bool>() ? 1 : 0) << ','
                    << c.at("value").get<double>() << ',' << c.at("tolerance").get<double>()
                    << '\n';
        payload = csv.str();
    } else {
        payload = report.dump(2) + "\n";
    }

    if (opts.outPath.empty()) {
        std::cout << payload;
    } else {
        std::ofstream out(opts.outPath);
        out << payload;
    }
    return exitCode;
}
