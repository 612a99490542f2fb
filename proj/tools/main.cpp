#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmtk/coarea.hpp"
#include "gmtk/crofton.hpp"
#include "gmtk/measure.hpp"
#include "gmtk/partition.hpp"
#include "gmtk/selftest.hpp"
#include "gmtk/whitney.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gmtk::ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw gmtk::ValidationError("cannot write file: " + out_path);
    out << text;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw gmtk::ValidationError("cannot write file: " + p.string());
    out << text;
}

int run(int argc, char** argv) {
    CLI::App app{"Hausdorff measures of piecewise-C1 scenes: area formula, "
                 "Cauchy-Crofton sampling, partitions, and property checks"};
    app.require_subcommand(1);

    // ---- measure
    auto* measure = app.add_subcommand("measure", "H^e of a scene by area or crofton");
    std::string m_scene, m_method = "area", m_out;
    int m_e = 1;
    long m_samples = 200000;
    std::uint64_t m_seed = 0;
    double m_window = 0.0;
    measure->add_option("scene", m_scene, "scene JSON file")->required();
    measure->add_option("--method", m_method, "area | crofton")
        ->check(CLI::IsMember({"area", "crofton"}));
    measure->add_option("--e", m_e, "intrinsic dimension")->required();
    measure->add_option("--samples", m_samples, "crofton sample count");
    measure->add_option("--seed", m_seed, "crofton seed");
    measure->add_option("--window", m_window, "crofton offset-ball radius (default: scene shadow)");
    measure->add_option("--out", m_out, "write the report here instead of stdout");

    // ---- partition
    auto* partition = app.add_subcommand("partition", "basic e-rectifiable partition of a scene");
    std::string p_scene, p_out;
    int p_e = 1;
    double p_eps = 0.0;
    partition->add_option("scene", p_scene, "scene JSON file")->required();
    partition->add_option("--e", p_e, "intrinsic dimension")->required();
    partition->add_option("--eps", p_eps, "flatness target (default: epsilon_n)");
    partition->add_option("--out", p_out, "write the partitioned scene here");

    // ---- property checks
    auto* coarea = app.add_subcommand("coarea-check", "co-area formula check");
    auto* cov = app.add_subcommand("cov-check", "change-of-variables check");
    auto* fubini = app.add_subcommand("fubini-check", "Fubini check");
    std::string ca_spec, ca_out, cv_spec, cv_out, fb_spec, fb_out;
    coarea->add_option("spec", ca_spec, "spec JSON file")->required();
    coarea->add_option("--out", ca_out, "report file");
    cov->add_option("spec", cv_spec, "spec JSON file")->required();
    cov->add_option("--out", cv_out, "report file");
    fubini->add_option("spec", fb_spec, "spec JSON file")->required();
    fubini->add_option("--out", fb_out, "report file");

    // ---- whitney
    auto* whitney = app.add_subcommand("whitney", "Whitney arc property verification on a cell");
    std::string w_cell, w_out;
    long w_trials = 1000;
    std::uint64_t w_seed = 0;
    double w_K = 0.0;
    whitney->add_option("--cell", w_cell, "cell JSON file")->required();
    whitney->add_option("--trials", w_trials, "random endpoint pairs");
    whitney->add_option("--seed", w_seed, "rng seed");
    whitney->add_option("--K", w_K, "override the K(n,L) bound");
    whitney->add_option("--out", w_out, "report file");

    // ---- selftest
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    int st_criterion = 0;
    selftest->add_option("--criterion", st_criterion, "run one criterion (1..9)")
        ->check(CLI::Range(1, 9));

    // ---- examples
    auto* examples = app.add_subcommand("examples", "write the bundled example documents");
    std::string ex_dir = "scenes";
    examples->add_option("--out-dir", ex_dir, "target directory");

    CLI11_PARSE(app, argc, argv);

    if (measure->parsed()) {
        gmtk::Scene s = gmtk::parse_scene(slurp(m_scene));
        gmtk::MeasureReport rep;
        if (m_method == "area") {
            rep = gmtk::hausdorff_measure(s, m_e);
        } else {
            gmtk::CroftonConfig cfg;
            cfg.samples = m_samples;
            cfg.seed = m_seed;
            cfg.window_radius = m_window;
            rep = gmtk::crofton_estimate(s, m_e, cfg);
        }
        emit(rep.to_json(), m_out);
        if (rep.unstable_fraction && *rep.unstable_fraction > 0.01) {
            std::cerr << "degeneracy warning: unstable sample fraction "
                      << *rep.unstable_fraction
                      << " (scene likely contains a plane-aligned patch)\n";
            return 2;
        }
        return 0;
    }

    if (partition->parsed()) {
        gmtk::Scene s = gmtk::parse_scene(slurp(p_scene));
        gmtk::Scene parted;
        if (p_eps > 0.0) {
            gmtk::PartitionConstants pc = gmtk::partition_constants(s.ambient_dim);
            parted.ambient_dim = s.ambient_dim;
            parted.partitioned = true;
            for (const auto& patch : s.patches) {
                if (patch.e != p_e || patch.kind == gmtk::Patch::Kind::Point) continue;
                for (auto& piece : gmtk::eflat_refine(patch, p_eps))
                    parted.patches.push_back(piece.unverified ? piece
                                                              : gmtk::graphify(piece, pc));
            }
            gmtk::refresh_bounding_box(parted);
        } else {
            parted = gmtk::rectifiable_partition(s, p_e);
        }
        long flagged = 0;
        double max_bound = 0.0;
        for (const auto& piece : parted.patches) {
            if (piece.unverified) ++flagged;
            if (piece.bound) max_bound = std::max(max_bound, *piece.bound);
        }
        nlohmann::ordered_json summary;
        summary["pieces"] = parted.patches.size();
        summary["max_bound"] = max_bound;
        summary["flagged"] = flagged;
        if (p_out.empty()) {
            std::cout << gmtk::serialize_scene(parted);
            std::cerr << summary.dump(2) << "\n";
        } else {
            emit(gmtk::serialize_scene(parted), p_out);
            std::cout << summary.dump(2) << "\n";
        }
        return flagged > 0 ? 2 : 0;
    }

    if (coarea->parsed()) {
        emit(gmtk::coarea_check_document(slurp(ca_spec)).to_json(), ca_out);
        return 0;
    }
    if (cov->parsed()) {
        emit(gmtk::cov_check_document(slurp(cv_spec)).to_json(), cv_out);
        return 0;
    }
    if (fubini->parsed()) {
        emit(gmtk::fubini_check_document(slurp(fb_spec)).to_json(), fb_out);
        return 0;
    }

    if (whitney->parsed()) {
        gmtk::CellDomain cell = gmtk::parse_cell(slurp(w_cell));
        double L = cell.chain_bound();
        if (!std::isfinite(L))
            throw gmtk::ValidationError(
                "whitney: the cell must declare finite derivative bounds");
        L = std::max(L, 1e-6);
        double K = w_K > 0.0 ? w_K : gmtk::whitney_constants(cell.ambient_dim(), L).K;
        gmtk::Rng rng(w_seed);
        gmtk::WhitneyReport rep = gmtk::whitney_verify(cell, K, w_trials, rng);
        nlohmann::ordered_json j;
        j["max_ratio"] = rep.max_ratio;
        j["max_pointwise_ratio"] = rep.max_pointwise_ratio;
        j["K_bound"] = rep.K_bound;
        j["trials"] = rep.trials;
        j["pass"] = rep.pass;
        emit(j.dump(2) + "\n", w_out);
        return rep.pass ? 0 : 2;
    }

    if (selftest->parsed()) {
        auto lines = gmtk::run_acceptance(st_criterion);
        bool all = true;
        for (const auto& line : lines) {
            all = all && line.pass;
            std::cout << (line.pass ? "PASS" : "FAIL") << "  [" << line.criterion << "] "
                      << line.name;
            if (!line.detail.empty()) std::cout << "  (" << line.detail << ")";
            std::cout << "\n";
        }
        std::cout << (all ? "selftest: all criteria passed\n" : "selftest: FAILURES above\n");
        return all ? 0 : 2;
    }

    if (examples->parsed()) {
        namespace fs = std::filesystem;
        fs::path dir(ex_dir);
        fs::create_directories(dir);
        write_file(dir / "segment.scene.json", gmtk::serialize_scene(gmtk::scenes::segment()));
        write_file(dir / "circle.scene.json", gmtk::serialize_scene(gmtk::scenes::circle()));
        write_file(dir / "sphere_cap.scene.json",
                   gmtk::serialize_scene(gmtk::scenes::sphere_cap()));
        write_file(dir / "parabola.scene.json", gmtk::serialize_scene(gmtk::scenes::parabola()));
        write_file(dir / "helix.scene.json", gmtk::serialize_scene(gmtk::scenes::helix()));
        write_file(dir / "double.scene.json",
                   gmtk::serialize_scene(gmtk::scenes::double_graphs()));
        write_file(dir / "points.scene.json", gmtk::serialize_scene(gmtk::scenes::points()));

        write_file(dir / "coarea_linear.json", R"json({
  "m": 2, "n": 1,
  "f": ["x"],
  "region": {"band_ext": {"base": {"interval": [0, 1]}, "g": "0", "h": "1", "bound": 0}}
}
)json");
        write_file(dir / "coarea_annulus.json", R"json({
  "m": 2, "n": 1,
  "f": ["sqrt(x^2 + y^2)"],
  "region": {"band_ext": {"base": {"interval": [0, 0.75]},
                          "g": "sqrt(max(0.0625 - x^2, 0))",
                          "h": "sqrt(0.5625 - x^2)"}}
}
)json");
        write_file(dir / "coarea_degree.json", R"json({
  "m": 1, "n": 1,
  "f": ["2*x"],
  "region": {"interval": [0, 0.5]}
}
)json");
        write_file(dir / "cov_polar.json", R"json({
  "d": 2,
  "f": ["x*cos(y)", "x*sin(y)"],
  "g": "1",
  "domain": {"band_ext": {"base": {"interval": [0.5, 1]}, "g": "0",
                          "h": "1.5707963267948966", "bound": 0}},
  "image": [{"band_ext": {"base": {"interval": [0, 1]},
                          "g": "sqrt(max(0.25 - x^2, 0))",
                          "h": "sqrt(max(1 - x^2, 0))"}}]
}
)json");
        write_file(dir / "fubini_sin.json", R"json({
  "n": 1, "m": 1,
  "f": "sin(x + y)"
}
)json");
        write_file(dir / "cell_square.json",
                   gmtk::serialize_cell(gmtk::CellDomain::band_ext(
                       gmtk::CellDomain::interval(0.0, 1.0), gmtk::VectorMap::parse(1, {"0"}),
                       gmtk::VectorMap::parse(1, {"1"}), 0.0)));
        write_file(dir / "cell_roof.json",
                   gmtk::serialize_cell(gmtk::CellDomain::band_ext(
                       gmtk::CellDomain::interval(0.5, 1.0), gmtk::VectorMap::parse(1, {"0"}),
                       gmtk::VectorMap::parse(1, {"x^2"}), 2.0)));
        std::cout << "wrote example documents to " << dir.string() << "\n";
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gmtk::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const gmtk::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const gmtk::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
