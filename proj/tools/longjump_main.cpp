#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <longjump/longjump.hpp>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

unsigned pick_threads(unsigned fromCli) {
  if (fromCli > 0) return fromCli;
  if (const char* env = std::getenv("LONGJUMP_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

longjump::Element parse_element(const std::string& text,
                                const longjump::Group& G) {
  std::vector<longjump::i64> coords;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::size_t used = 0;
    coords.push_back(std::stoll(part, &used));
    if (used != part.size())
      throw std::runtime_error("bad coordinate '" + part + "'");
  }
  if (static_cast<int>(coords.size()) != G.coords())
    throw std::runtime_error("expected " + std::to_string(G.coords()) +
                             " coordinates for " + G.name());
  longjump::Element g;
  g.n = static_cast<std::uint8_t>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    g[static_cast<int>(i)] = coords[i];
  G.validate(g);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-jump random walks on groups of polynomial growth"};
  app.require_subcommand(1);

  std::string configPath;
  std::string outDir;
  std::string elementText;
  unsigned threads = 0;
  double cap = 64.0;

  CLI::App* run =
      app.add_subcommand("run", "run the experiment described by a config");
  run->add_option("config", configPath, "JSON config file")->required();
  run->add_option("--threads", threads,
                  "worker threads (default: LONGJUMP_THREADS or 1)");
  run->add_option("--out", outDir, "output directory (overrides the config)");

  CLI::App* audit = app.add_subcommand(
      "audit-geometry", "derive and print the adapted geometry for a config");
  audit->add_option("config", configPath, "JSON config file")->required();
  audit->add_option("--out", outDir, "output directory (overrides the config)");

  CLI::App* oracle = app.add_subcommand(
      "oracle-norm", "compare the closed-form norm against the search oracle");
  oracle->add_option("config", configPath, "JSON config file")->required();
  oracle->add_option("--element", elementText, "coordinates, e.g. \"3;-8\"")
      ->required();
  oracle->add_option("--cap", cap, "largest norm the oracle will search");

  CLI11_PARSE(app, argc, argv);

  try {
    longjump::ExperimentConfig cfg =
        longjump::parse_config(read_file(configPath));
    std::string dir = outDir.empty() ? cfg.outputDir : outDir;

    if (app.got_subcommand(run)) {
      int rc = longjump::run_experiment(cfg, pick_threads(threads), dir);
      std::cout << (rc == 0 ? "PASS " : "FAIL ") << cfg.experiment << " -> "
                << dir << "\n";
      return rc;
    }

    if (app.got_subcommand(audit)) {
      cfg.experiment = "geometry-audit";
      cfg.params = longjump::ordered_json::object();
      int rc = longjump::run_experiment(cfg, 1, dir);
      longjump::AdaptedGeometry geom =
          longjump::build_adapted_geometry(cfg.spec);
      std::cout << geom.to_json().dump(2) << "\n";
      return rc;
    }

    // oracle-norm
    longjump::AdaptedGeometry geom = longjump::build_adapted_geometry(cfg.spec);
    longjump::Element g = parse_element(elementText, cfg.group);
    double closed = geom.closed_norm(g);
    std::optional<double> found =
        longjump::oracle_norm(cfg.group, geom.system_g(), g, cap);
    std::cout << "closedForm=" << longjump::fmt_double(closed) << "\n";
    if (!found) {
      std::cout << "oracle=aboveCap cap=" << longjump::fmt_double(cap) << "\n";
      return 1;
    }
    std::cout << "oracle=" << longjump::fmt_double(*found) << "\n";
    double lo = std::min(closed, *found), hi = std::max(closed, *found);
    bool ok = lo > 0.0 ? hi / lo <= 4.0 : hi == 0.0;
    std::cout << (ok ? "agreement=within4x" : "agreement=DIVERGED") << "\n";
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
