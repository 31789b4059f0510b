#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/nonlocal.hpp"
#include "fraclab/scenario.hpp"

namespace fs = std::filesystem;
using namespace fraclab;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void emit_outputs(const RunOutput& out, const fs::path& dir) {
    fs::path base = dir / out.summary.scenario;
    fs::create_directories(base);
    write_file(base / "summary.txt", summary_text(out.summary));
    for (const Field& f : out.fields)
        write_file(base / ("field_t" + format_double(f.time) + ".csv"), field_csv(f));
    for (const auto& [name, ser] : out.series)
        write_file(base / ("series_" + name + ".csv"), series_csv(ser));
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("FRACLAB_OUT")) return env;
    return "out";
}

int report(const RunOutput& out, const fs::path& dir) {
    emit_outputs(out, dir);
    for (const CheckResult& c : out.summary.checks)
        std::cout << out.summary.scenario << ": " << c.name << " = " << format_double(c.value)
                  << " [" << (c.pass ? "pass" : "FAIL") << "]\n";
    for (const std::string& w : out.summary.warnings)
        std::cout << out.summary.scenario << ": warning: " << w << "\n";
    return out.summary.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: a numerical laboratory for nonlinear and fractional diffusion"};
    app.require_subcommand(1);

    std::string config_path, out_flag, pair = "spectral,quadrature";
    double s_order = 0.5, t_time = 1.0;
    int jobs = 1, table_n = 256;
    double table_xmax = 64.0;

    CLI::App* run = app.add_subcommand("run", "run one scenario from a config file");
    run->add_option("config", config_path, "scenario config file")->required();
    run->add_option("--out", out_flag, "output directory (default $FRACLAB_OUT or ./out)");

    CLI::App* run_all = app.add_subcommand("run-all", "run every built-in scenario");
    run_all->add_option("--jobs", jobs, "parallel workers")->check(CLI::Range(1, 64));
    run_all->add_option("--out", out_flag, "output directory (default $FRACLAB_OUT or ./out)");

    app.add_subcommand("list-scenarios", "list the built-in scenarios");

    CLI::App* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("config", config_path, "scenario config file")->required();

    CLI::App* vop = app.add_subcommand(
        "validate-operator", "cross-check two operator discretizations on a smooth battery");
    vop->add_option("--s", s_order, "fractional order in (0,1)")->required();
    vop->add_option("--pair", pair,
                    "comma pair from spectral, quadrature, semigroup (default spectral,quadrature)");

    CLI::App* ktab = app.add_subcommand("kernel-table",
                                        "tabulate the free-space kernel against its envelope");
    ktab->add_option("--s", s_order, "fractional order in (0,1)")->required();
    ktab->add_option("--t", t_time, "time")->required();
    ktab->add_option("--xmax", table_xmax, "largest abscissa (default 64)");
    ktab->add_option("--n", table_n, "number of samples (default 256)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            Scenario sc = parse_scenario(read_file(config_path));
            return report(run_scenario(sc), output_dir(out_flag));
        }

        if (run_all->parsed()) {
            const std::vector<Scenario>& all = builtin_scenarios();
            std::vector<RunOutput> outs(all.size());
            std::vector<std::string> errors(all.size());
            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (size_t i = next++; i < all.size(); i = next++) {
                    try {
                        outs[i] = run_scenario(all[i]);
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
            worker();
            for (std::thread& t : pool) t.join();
            int rc = 0;
            fs::path dir = output_dir(out_flag);
            for (size_t i = 0; i < all.size(); ++i) {
                if (!errors[i].empty()) {
                    std::cout << all[i].name << ": error: " << errors[i] << "\n";
                    rc = 1;
                } else if (report(outs[i], dir) != 0) {
                    rc = 1;
                }
            }
            return rc;
        }

        if (app.get_subcommand("list-scenarios")->parsed()) {
            for (const Scenario& sc : builtin_scenarios())
                std::cout << sc.name << "\n    " << sc.description << "\n";
            return 0;
        }

        if (validate->parsed()) {
            Scenario sc = parse_scenario(read_file(config_path));
            validate_scenario(sc);
            std::cout << sc.name << ": valid\n";
            return 0;
        }

        if (vop->parsed()) {
            auto eval = [&](const std::string& which, const Field& f) {
                if (which == "spectral") return apply_spectral(f, s_order);
                if (which == "quadrature") return apply_quadrature(f, s_order);
                if (which == "semigroup") return apply_semigroup(f, s_order);
                throw std::runtime_error("unknown operator name: " + which);
            };
            size_t comma = pair.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("--pair needs two comma-separated names");
            std::string a = pair.substr(0, comma), b = pair.substr(comma + 1);
            Grid1D g(-16.0, 32.0, 2048, Geometry::Periodic);
            std::vector<Field> battery = {
                sample(g, [](double x) { return std::exp(-x * x); }),
                sample(g, [](double x) { return std::cos(std::numbers::pi * x / 4.0); }),
                sample(g,
                       [](double x) {
                           double r = 1.0 - x * x;
                           return r > 0.0 ? r * r * r * r : 0.0;
                       })};
            double worst = 0.0;
            for (const Field& f : battery) {
                Field fa = eval(a, f), fb = eval(b, f);
                double w = 0.0, m = 0.0;
                for (int i = 0; i < f.size(); ++i) {
                    w = std::max(w, std::abs(fa[i] - fb[i]));
                    m = std::max(m, std::abs(fb[i]));
                }
                worst = std::max(worst, w / m);
            }
            std::cout << a << " vs " << b << " at s = " << format_double(s_order)
                      << ": max relative sup error " << format_double(worst) << "\n";
            return worst <= 1e-3 ? 0 : 1;
        }

        if (ktab->parsed()) {
            std::cout << "x,kernel,envelope,ratio\n";
            for (int i = 0; i <= table_n; ++i) {
                double x = table_xmax * i / table_n;
                double k = freespace_heat_kernel(x, t_time, s_order);
                double e = bg_envelope(x, t_time, s_order);
                std::cout << format_double(x) << "," << format_double(k) << ","
                          << format_double(e) << "," << format_double(k / e) << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
