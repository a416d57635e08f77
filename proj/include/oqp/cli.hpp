#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqp {

// Command-line front end. Subcommands: rate, optimize, simulate, classify.
// Exit codes: 0 ok, 2 domain error, 3 no-crossing / empty admissible set,
// 4 simulation unresolved (estimate below 1e-8 over the finite run).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Schema checks for the JSON documents the CLI emits; used by the round-trip
// tests and available to downstream consumers.
bool validate_sim_report_json(const std::string& text, std::string* why = nullptr);
bool validate_optimization_json(const std::string& text, std::string* why = nullptr);

}  // namespace oqp
