// Ports CUDA sources (.cu/.cuh) to HIP.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "gpuport/cuda2hip/port.hpp"
#include "gpuport/cuda2hip/rules.hpp"

int main(int argc, char** argv) {
  namespace c2h = gpuport::cuda2hip;
  CLI::App app{"Translate CUDA sources to HIP"};
  std::string path;
  std::string out;
  std::string rules_file;
  std::string report_file;
  bool dry_run = false;
  bool print_rules = false;
  app.add_option("path", path, "A .cu/.cuh file or a directory to port");
  app.add_option("--out", out, "Output root (default: the cuda/ directory becomes hip/)");
  app.add_option("--rules", rules_file, "Extra rules file layered over the built-in table");
  app.add_flag("--dry-run", dry_run, "Translate and report without writing files");
  app.add_option("--report", report_file, "Write the report here instead of stdout");
  app.add_flag("--print-rules", print_rules, "Print the effective rule table and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    c2h::RuleTable rules = c2h::builtin_rules();
    if (!rules_file.empty()) rules.merge(c2h::load_rules(rules_file));
    if (print_rules) {
      std::cout << c2h::format_rules(rules);
      return 0;
    }
    if (path.empty()) {
      std::cerr << "cuda2hip: a path is required\n" << app.help();
      return 2;
    }
    c2h::PortOptions options;
    if (!out.empty()) options.out = std::filesystem::path(out);
    options.dry_run = dry_run;
    const auto report = c2h::port_tree(path, rules, options);
    const auto text = c2h::format_report(report);
    if (report_file.empty()) {
      std::cout << text;
    } else {
      c2h::write_file(report_file, text);
    }
    for (const auto& f : report.files) {
      if (!f.ok()) std::cerr << "cuda2hip: " << f.source << ": " << f.error << "\n";
    }
    return report.ok() ? 0 : 1;
  } catch (const gpuport::Error& e) {
    std::cerr << "cuda2hip: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
}
