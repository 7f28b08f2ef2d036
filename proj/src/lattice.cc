#include "circle/lattice.hh"

#include <algorithm>

namespace circle {

SolutionRecord classify_tuple(const ParametricExpansion &exp, TupleMatrix x) {
  SolutionRecord rec;
  rec.disc_value = gram_det(x);
  rec.rank = rank_of(x);
  rec.has_sat = (rec.rank == exp.m);
  if (rec.has_sat) {
    rec.sat_index = saturation_index(x);
    rec.primitive = (rec.sat_index == 1);
  }
  rec.x = std::move(x);
  return rec;
}

namespace {

struct EnumPlan {
  const ParametricExpansion &exp;
  long P;
  // forms to check once column k (0-based) is complete: exactly the phi_j
  // whose largest tuple index is k+1
  std::vector<std::vector<const Form *>> checks;

  EnumPlan(const ParametricExpansion &e, long P_) : exp(e), P(P_), checks(e.m) {
    for (const MultiIndex &j : e.index_set) {
      int top = *std::max_element(j.entries.begin(), j.entries.end());
      checks[top - 1].push_back(&e.phi(j));
    }
  }
};

// Depth-first fill of entries in flattened order.  pos counts filled entries;
// at each column boundary the supported forms are tested against zero.
void walk(const EnumPlan &plan, std::vector<ZZ> &entries, int pos,
          const EnumOptions &opt, std::vector<SolutionRecord> &out) {
  const int s = plan.exp.s, total = plan.exp.m * s;
  if (pos == total) {
    TupleMatrix x(s, plan.exp.m);
    x.e = entries;
    SolutionRecord rec = classify_tuple(plan.exp, std::move(x));
    if (opt.has_filter && rec.disc_value != opt.b) return;
    out.push_back(std::move(rec));
    return;
  }
  for (long v = -plan.P; v <= plan.P; ++v) {
    entries[pos] = v;
    bool alive = true;
    if ((pos + 1) % s == 0) {
      int col = pos / s;
      for (const Form *f : plan.checks[col]) {
        if (f->eval(entries) != 0) {
          alive = false;
          break;
        }
      }
    }
    if (alive) walk(plan, entries, pos + 1, opt, out);
  }
  entries[pos] = 0;
}

}  // namespace

void enumerate_solutions(const ParametricExpansion &exp, long P, const EnumOptions &opt,
                         const SolutionSink &sink) {
  if (P < 0) throw ShapeError("enumerate_solutions: box radius must be nonnegative");
  if (opt.budget) {
    ZZ points = 1;
    for (int i = 0; i < exp.m * exp.s; ++i) points *= 2 * P + 1;
    opt.budget->require(points.fits_ulong_p() ? points.get_ui() : UINT64_MAX);
  }

  const uint64_t width = static_cast<uint64_t>(2 * P + 1);
  std::vector<std::vector<SolutionRecord>> parts(width);
  parallel_for_chunks(width, opt.workers, [&](uint64_t chunk) {
    EnumPlan plan(exp, P);
    std::vector<ZZ> entries(static_cast<size_t>(exp.m) * exp.s, ZZ(0));
    entries[0] = -P + static_cast<long>(chunk);
    // first entry fixed; test a completed column immediately when s == 1
    bool alive = true;
    if (exp.s == 1) {
      for (const Form *f : plan.checks[0])
        if (f->eval(entries) != 0) alive = false;
    }
    if (alive) walk(plan, entries, 1, opt, parts[chunk]);
  });

  for (auto &part : parts)
    for (auto &rec : part) sink(rec);
}

ZZ count_Nm(const ParametricExpansion &exp, long P, int workers, Budget *budget) {
  EnumOptions opt;
  opt.workers = workers;
  opt.budget = budget;
  ZZ n = 0;
  enumerate_solutions(exp, P, opt, [&](const SolutionRecord &) { ++n; });
  return n;
}

ZZ count_Nm_b(const ParametricExpansion &exp, long P, const ZZ &b, int workers, Budget *budget) {
  EnumOptions opt;
  opt.has_filter = true;
  opt.b = b;
  opt.workers = workers;
  opt.budget = budget;
  ZZ n = 0;
  enumerate_solutions(exp, P, opt, [&](const SolutionRecord &) { ++n; });
  return n;
}

std::map<ZZ, ZZ> count_by_disc(const ParametricExpansion &exp, long P, int workers,
                               Budget *budget) {
  EnumOptions opt;
  opt.workers = workers;
  opt.budget = budget;
  std::map<ZZ, ZZ> hist;
  enumerate_solutions(exp, P, opt,
                      [&](const SolutionRecord &rec) { ++hist[rec.disc_value]; });
  return hist;
}

void write_solutions_csv(std::ostream &os, const ParametricExpansion &exp, long P,
                         const EnumOptions &opt) {
  os << "entries;disc;rank;sat_index;primitive\n";
  enumerate_solutions(exp, P, opt, [&](const SolutionRecord &rec) {
    for (size_t i = 0; i < rec.x.e.size(); ++i) {
      if (i) os << ',';
      os << rec.x.e[i];
    }
    os << ';' << rec.disc_value << ';' << rec.rank << ';';
    if (rec.has_sat)
      os << rec.sat_index << ';' << (rec.primitive ? 1 : 0);
    else
      os << ';';
    os << '\n';
  });
}

}  // namespace circle
