// wfpm-gen: write deterministic synthetic FIMI files.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic transaction database generator"};
  std::string kind;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t transactions = 0;
  app.add_option("kind", kind, "mushroom | chess | retail | uniform")->required();
  app.add_option("--out,-o", out, "output file (stdout if omitted)");
  app.add_option("--seed", seed, "generator seed (0 = the kind's default)");
  app.add_option("--transactions", transactions, "transaction count (uniform/retail)");
  CLI11_PARSE(app, argc, argv);

  try {
    wfpm::Dataset d;
    if (kind == "uniform") {
      d = wfpm::synthetic::uniform(seed, transactions ? transactions : 100, 30, 8);
    } else if (kind == "retail" && transactions) {
      d = wfpm::synthetic::retail_like(seed ? seed : 3, transactions);
    } else {
      const std::uint64_t defaults = kind == "mushroom" ? 1 : kind == "chess" ? 2 : 3;
      d = wfpm::synthetic::by_name(kind, seed ? seed : defaults);
    }
    if (out.empty()) {
      wfpm::write_transactions(std::cout, d);
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw wfpm::ConfigError("cannot write '" + out + "'");
      wfpm::write_transactions(f, d);
    }
  } catch (const wfpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
