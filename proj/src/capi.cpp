#include "fpl.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "fpl/common.hpp"
#include "fpl/datasets.hpp"
#include "fpl/experiments.hpp"
#include "fpl/spectral.hpp"
#include "fpl/version.hpp"

namespace {

thread_local std::string g_last_error;

fpl_status fail_with(fpl_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

fpl_status classify(const std::string& what) {
    if (what.find("cannot open") != std::string::npos ||
        what.find("truncated") != std::string::npos ||
        what.find("cannot write") != std::string::npos)
        return FPL_ERR_IO;
    if (what.rfind("config:", 0) == 0 || what.rfind("unknown experiment", 0) == 0)
        return FPL_ERR_BAD_CONFIG;
    return FPL_ERR_NUMERIC;
}

template <typename Fn>
fpl_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FPL_OK;
    } catch (const fpl::Error& e) {
        return fail_with(classify(e.what()), e.what());
    } catch (const std::exception& e) {
        return fail_with(FPL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail_with(FPL_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct fpl_config {
    fpl::experiments::Config impl;
    mutable std::string scratch;
};

extern "C" {

const char* fpl_version(void) { return FPL_VERSION; }

const char* fpl_status_name(fpl_status status) {
    switch (status) {
        case FPL_OK: return "ok";
        case FPL_ERR_INVALID_ARGUMENT: return "invalid argument";
        case FPL_ERR_IO: return "io error";
        case FPL_ERR_BAD_CONFIG: return "bad config";
        case FPL_ERR_NUMERIC: return "numeric error";
        case FPL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* fpl_last_error(void) { return g_last_error.c_str(); }

fpl_config* fpl_config_new(void) { return new (std::nothrow) fpl_config{}; }

void fpl_config_free(fpl_config* config) { delete config; }

fpl_status fpl_config_load_file(fpl_config* config, const char* path) {
    if (!config || !path) return fail_with(FPL_ERR_INVALID_ARGUMENT, "null config or path");
    return guarded([&] {
        auto loaded = fpl::experiments::Config::from_file(path);
        for (const auto& [k, v] : loaded.entries()) config->impl.set(k, v);
    });
}

fpl_status fpl_config_set(fpl_config* config, const char* key, const char* value) {
    if (!config || !key || !value)
        return fail_with(FPL_ERR_INVALID_ARGUMENT, "null config, key, or value");
    if (!*key) return fail_with(FPL_ERR_INVALID_ARGUMENT, "empty key");
    return guarded([&] { config->impl.set(key, value); });
}

const char* fpl_config_get(const fpl_config* config, const char* key) {
    if (!config || !key) return nullptr;
    auto it = config->impl.entries().find(key);
    if (it == config->impl.entries().end()) return nullptr;
    config->scratch = it->second;
    return config->scratch.c_str();
}

size_t fpl_experiment_count(void) { return fpl::experiments::experiment_names().size(); }

const char* fpl_experiment_name(size_t index) {
    const auto& names = fpl::experiments::experiment_names();
    if (index >= names.size()) return nullptr;
    return names[index].c_str();
}

fpl_status fpl_run_experiment(const char* name, const fpl_config* config, const char* out_dir,
                              int emit_svg, char** manifest_json_out) {
    if (!name || !out_dir) return fail_with(FPL_ERR_INVALID_ARGUMENT, "null name or out_dir");
    static const fpl_config empty{};
    const fpl_config* cfg = config ? config : &empty;
    return guarded([&] {
        auto manifest =
            fpl::experiments::run_experiment(name, cfg->impl, out_dir, emit_svg != 0);
        if (manifest_json_out) *manifest_json_out = dup_string(manifest.to_json());
    });
}

void fpl_string_free(char* s) { std::free(s); }

fpl_status fpl_dft_1d(const double* samples, size_t n, double* re_out, double* im_out) {
    if (!samples || !re_out || !im_out)
        return fail_with(FPL_ERR_INVALID_ARGUMENT, "null buffer");
    return guarded([&] {
        fpl::Vec y(samples, samples + n);
        fpl::CVec c = fpl::spectral::dft_1d(y);
        for (size_t k = 0; k < n; ++k) {
            re_out[k] = c[k].real();
            im_out[k] = c[k].imag();
        }
    });
}

fpl_status fpl_gaussian_low_high_split(const double* inputs, size_t n, size_t d,
                                       const double* labels, size_t c, double delta,
                                       double* low_out, double* high_out) {
    if (!inputs || !labels || !low_out || !high_out)
        return fail_with(FPL_ERR_INVALID_ARGUMENT, "null buffer");
    return guarded([&] {
        fpl::Mat x(n, d), y(n, c);
        std::memcpy(x.data.data(), inputs, n * d * sizeof(double));
        std::memcpy(y.data.data(), labels, n * c * sizeof(double));
        auto f = fpl::spectral::gaussian_low_high_split(x, y, delta);
        std::memcpy(low_out, f.low.data.data(), n * c * sizeof(double));
        std::memcpy(high_out, f.high.data.data(), n * c * sizeof(double));
    });
}

fpl_status fpl_parity_exact_ft(size_t d, const double* k, double* re_out, double* im_out) {
    if (!k || !re_out || !im_out) return fail_with(FPL_ERR_INVALID_ARGUMENT, "null buffer");
    return guarded([&] {
        fpl::Vec kv(k, k + d);
        auto v = fpl::datasets::parity_exact_ft(d, kv);
        *re_out = v.real();
        *im_out = v.imag();
    });
}

}  // extern "C"
