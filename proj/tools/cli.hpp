#pragma once

// Command implementations behind the combspec executable.

#include <chrono>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "combspec/generator.hpp"
#include "combspec/wfomc.hpp"

namespace combspec::cli {

enum ExitCode : int {
    kOk = 0,
    kParse = 2,  // also command-line usage errors
    kFragment = 3,
    kBudget = 4,
    kIo = 5,
};

constexpr int kJsonVersion = 1;

struct RunProfile {
    std::string name;
    GenLimits limits;
    int length = 10;
    std::chrono::seconds budget{300};
    int workers = 1;
};

// "fo2-paper" or "c2-paper"; throws std::invalid_argument otherwise.
RunProfile builtin_profile(const std::string& name);
std::vector<std::string> builtin_profile_names();

// "P=w" or "P=w,wbar" (integers).
WeightMap parse_weights(const std::vector<std::string>& specs);

struct Output {
    std::ostream& out;
    std::ostream& err;
    bool json = false;
};

int cmd_wfomc(const Output& o, const std::string& sentence, int n, const WeightMap& w, std::chrono::seconds budget);
int cmd_spectrum(const Output& o, const std::string& sentence, int length, std::chrono::seconds budget);

struct GenerateOptions {
    RunProfile profile;
    int layers = 3;
    std::string db_path;  // empty: in-memory
};

int cmd_generate(const Output& o, const GenerateOptions& opts);

int cmd_db_stats(const Output& o, const std::string& db_path);
int cmd_db_export(const Output& o, const std::string& db_path, const std::string& out_path,
                  const std::string& status, int layer, const std::string& profile);
int cmd_db_import(const Output& o, const std::string& db_path, const std::string& in_path);

struct OeisOptions {
    std::string db_path;
    std::string stripped_path;
    bool online = false;
    std::string replay_path;  // recorded responses instead of the network
    bool lenient = false;
};

int cmd_oeis(const Output& o, const OeisOptions& opts);

// Full command line, including parsing of flags and the config file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace combspec::cli
