// fpl command line: runs the named experiment through the shared C API.
//
//   fpl <experiment> [--config FILE] [--out DIR] [--seed N] [--svg] [key=value ...]
//   fpl list

#include <cstdio>
#include <cstring>
#include <string>

#include "fpl.h"

namespace {

void usage() {
    std::printf("usage: fpl <experiment> [--config FILE] [--out DIR] [--seed N] [--svg] "
                "[key=value ...]\n");
    std::printf("       fpl list\n");
    std::printf("experiments:");
    for (size_t i = 0; i < fpl_experiment_count(); ++i)
        std::printf(" %s", fpl_experiment_name(i));
    std::printf("\n");
}

int fail(fpl_status st) {
    std::fprintf(stderr, "fpl: %s: %s\n", fpl_status_name(st), fpl_last_error());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage();
        return 2;
    }
    const std::string cmd = argv[1];
    if (cmd == "list" || cmd == "--help" || cmd == "-h") {
        usage();
        return cmd == "list" ? 0 : 2;
    }

    fpl_config* cfg = fpl_config_new();
    if (!cfg) {
        std::fprintf(stderr, "fpl: out of memory\n");
        return 1;
    }
    std::string out_dir = "out/" + cmd;
    int emit_svg = 0;
    int rc = 0;
    for (int i = 2; i < argc && rc == 0; ++i) {
        const std::string arg = argv[i];
        auto next = [&](const char* what) -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "fpl: %s needs a value\n", what);
                rc = 2;
                return nullptr;
            }
            return argv[++i];
        };
        if (arg == "--config") {
            const char* path = next("--config");
            if (!path) break;
            const fpl_status st = fpl_config_load_file(cfg, path);
            if (st != FPL_OK) rc = fail(st);
        } else if (arg == "--out") {
            const char* dir = next("--out");
            if (!dir) break;
            out_dir = dir;
        } else if (arg == "--seed") {
            const char* seed = next("--seed");
            if (!seed) break;
            const fpl_status st = fpl_config_set(cfg, "seed", seed);
            if (st != FPL_OK) rc = fail(st);
        } else if (arg == "--svg") {
            emit_svg = 1;
        } else if (arg.find('=') != std::string::npos && arg[0] != '-') {
            const std::string key = arg.substr(0, arg.find('='));
            const std::string value = arg.substr(arg.find('=') + 1);
            const fpl_status st = fpl_config_set(cfg, key.c_str(), value.c_str());
            if (st != FPL_OK) rc = fail(st);
        } else {
            std::fprintf(stderr, "fpl: unknown argument '%s'\n", arg.c_str());
            rc = 2;
        }
    }
    if (rc != 0) {
        fpl_config_free(cfg);
        return rc;
    }

    char* manifest = nullptr;
    const fpl_status st = fpl_run_experiment(cmd.c_str(), cfg, out_dir.c_str(), emit_svg,
                                             &manifest);
    if (st != FPL_OK) {
        fpl_config_free(cfg);
        return fail(st);
    }
    if (manifest) {
        std::fputs(manifest, stdout);
        fpl_string_free(manifest);
    }
    fpl_config_free(cfg);
    return 0;
}
