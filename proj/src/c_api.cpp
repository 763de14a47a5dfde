#include "mspec/mspec.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "mspec/config.hpp"
#include "mspec/error.hpp"
#include "mspec/io.hpp"
#include "mspec/moments.hpp"
#include "mspec/pipeline.hpp"
#include "mspec/stieltjes.hpp"

struct mspec_config {
  mspec::RunConfig cfg;
};

struct mspec_moments {
  mspec::MomentSequence ms;
};

struct mspec_measure {
  mspec::AtomicMeasure am;
};

namespace {

thread_local std::string last_error;

mspec_status fail(mspec_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
mspec_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return MSPEC_OK;
  } catch (const mspec::Error& e) {
    return fail(static_cast<mspec_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MSPEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MSPEC_ERR_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw mspec::Error(mspec::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* mspec_version(void) { return mspec::kVersion; }

const char* mspec_status_string(mspec_status status) {
  if (status == MSPEC_OK) return "ok";
  if (status == MSPEC_ERR_INTERNAL) return "internal error";
  return mspec::error_code_name(static_cast<mspec::ErrorCode>(status));
}

const char* mspec_last_error(void) { return last_error.c_str(); }

void mspec_string_free(char* s) { std::free(s); }

mspec_status mspec_config_new(mspec_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mspec_config{};
  });
}

mspec_status mspec_config_parse(const char* text, mspec_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new mspec_config{mspec::parse_config(text)};
  });
}

mspec_status mspec_config_load(const char* path, mspec_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const std::string text = mspec::io::read_file(path);
    try {
      *out = new mspec_config{mspec::parse_config(text)};
    } catch (const mspec::Error& e) {
      throw mspec::Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

mspec_status mspec_config_set(mspec_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    mspec::set_config_value(cfg->cfg, key, value);
  });
}

mspec_status mspec_config_get(const mspec_config* cfg, const char* key, char** value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    *value = duplicate(mspec::get_config_value(cfg->cfg, key));
  });
}

mspec_status mspec_config_emit(const mspec_config* cfg, char** text) {
  return guarded([&] {
    require(cfg, "cfg");
    require(text, "text");
    *text = duplicate(mspec::emit_config(cfg->cfg));
  });
}

void mspec_config_free(mspec_config* cfg) { delete cfg; }

mspec_status mspec_run(const mspec_config* cfg, const char* out_dir, const mspec_run_options* options,
                       char** report_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    mspec::RunOptions opt;
    if (options) {
      opt.strict = options->strict != 0;
      opt.dump_matrix = options->dump_matrix != 0;
      opt.dump_grid = options->dump_grid != 0;
    }
    const auto report = mspec::run_pipeline(cfg->cfg, out_dir, opt);
    if (report_json) *report_json = duplicate(report.dump(2));
  });
}

mspec_status mspec_compare_files(const char* spectrum_a, const char* spectrum_b, double tol, double zero_tol,
                                 char** report_json, int* all_matched) {
  return guarded([&] {
    require(spectrum_a, "spectrum_a");
    require(spectrum_b, "spectrum_b");
    if (!(tol >= 0) || !(zero_tol >= 0)) {
      throw mspec::Error(mspec::ErrorCode::InvalidArgument, "tolerances must be >= 0");
    }
    auto load = [](const char* path) {
      std::istringstream is(mspec::io::read_file(path));
      try {
        return mspec::io::read_spectrum(is);
      } catch (const mspec::Error& e) {
        throw mspec::Error(e.code(), std::string(path) + ": " + e.what());
      }
    };
    const auto report = mspec::compare_spectra(load(spectrum_a), load(spectrum_b), tol, zero_tol);
    if (report_json) *report_json = duplicate(mspec::to_json(report).dump(2));
    if (all_matched) *all_matched = report.all_matched() ? 1 : 0;
  });
}

mspec_status mspec_replay(const char* manifest, const char* out_dir, char** report_json, int* reproduced) {
  return guarded([&] {
    require(manifest, "manifest");
    require(out_dir, "out_dir");
    const auto report = mspec::replay_manifest(manifest, out_dir);
    if (report_json) *report_json = duplicate(report.dump(2));
    if (reproduced) *reproduced = report.at("reproduced").get<bool>() ? 1 : 0;
  });
}

mspec_status mspec_moments_pde(const mspec_config* cfg, mspec_moments** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const auto& c = cfg->cfg;
    const auto domain = mspec::make_domain(c);
    const bool radial = c.grid_radial && std::holds_alternative<mspec::Disk>(domain.shape());
    const auto grid = radial ? mspec::build_radial_grid(domain, c.grid_h) : mspec::build_grid(domain, c.grid_h);
    const auto fields = mspec::exit_moment_fields(grid, c.moments_n_max, c.moments_tol);
    *out = new mspec_moments{mspec::moment_sequence(fields, c.moments_tol)};
  });
}

mspec_status mspec_moments_analytic(const mspec_config* cfg, mspec_moments** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = new mspec_moments{mspec::analytic_moments(mspec::make_domain(cfg->cfg), cfg->cfg.moments_n_max)};
  });
}

mspec_status mspec_moments_read(const char* path, mspec_moments** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::istringstream is(mspec::io::read_file(path));
    *out = new mspec_moments{mspec::io::read_moments(is)};
  });
}

size_t mspec_moments_count(const mspec_moments* ms) { return ms ? ms->ms.A.size() : 0; }

mspec_status mspec_moments_get(const mspec_moments* ms, size_t n, double* A, double* mu) {
  return guarded([&] {
    require(ms, "ms");
    if (n >= ms->ms.A.size()) throw mspec::Error(mspec::ErrorCode::InvalidArgument, "moment index out of range");
    if (A) *A = ms->ms.A_at(static_cast<int>(n));
    if (mu) *mu = ms->ms.mu_at(static_cast<int>(n));
  });
}

void mspec_moments_free(mspec_moments* ms) { delete ms; }

mspec_status mspec_invert(const mspec_moments* ms, int p, int extended, mspec_measure** out) {
  return guarded([&] {
    require(ms, "ms");
    require(out, "out");
    const auto precision = extended ? mspec::Precision::Extended : mspec::Precision::Standard;
    *out = new mspec_measure{mspec::invert_moments(ms->ms, p, precision)};
  });
}

size_t mspec_measure_count(const mspec_measure* m) { return m ? m->am.atoms.size() : 0; }

mspec_status mspec_measure_atom(const mspec_measure* m, size_t i, double* lambda, double* a2) {
  return guarded([&] {
    require(m, "m");
    if (i >= m->am.atoms.size()) throw mspec::Error(mspec::ErrorCode::InvalidArgument, "atom index out of range");
    if (lambda) *lambda = 2.0 / m->am.atoms[i].x;
    if (a2) *a2 = m->am.atoms[i].w;
  });
}

void mspec_measure_free(mspec_measure* m) { delete m; }

}  // extern "C"
