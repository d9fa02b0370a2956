#include <fstream>
#include <sstream>

#include "ovoid/errors.hpp"
#include "ovoid/exact_cover.hpp"

namespace ovoid {

namespace {

// LP readers limit line length; wrap sums every few terms.
constexpr int kTermsPerLine = 16;

void write_sum(std::ostringstream& os, const PointSet& vars) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) os << ((i % kTermsPerLine == 0) ? "\n   + " : " + ");
    os << 'X' << vars[i];
  }
}

}  // namespace

std::string lp_model(const HittingInstance& inst, const PointSet& forced, LpMode mode) {
  for (auto p : forced)
    if (p >= inst.universe_size) throw DomainError("forced point out of range");
  std::ostringstream os;
  os << "\\ " << (mode == LpMode::exact ? "exact hitting set" : "maximum packing") << ": " << inst.origin << "\n";
  os << "\\ " << inst.universe_size << " variables, " << inst.blocks.size() << " blocks, " << forced.size()
     << " fixed\n";
  PointSet all(inst.universe_size);
  for (std::uint32_t p = 0; p < inst.universe_size; ++p) all[p] = p;
  if (mode == LpMode::packing) {
    os << "Maximize\n obj: ";
    write_sum(os, all);
  } else {
    os << "Minimize\n obj:";
  }
  os << "\nSubject To\n";
  const char* rel = mode == LpMode::exact ? " = 1\n" : " <= 1\n";
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    os << " e" << k << ": ";
    write_sum(os, inst.blocks[k]);
    os << rel;
  }
  os << "Bounds\n";
  for (auto p : forced) os << " X" << p << " = 1\n";
  os << "Binary\n";
  for (std::uint32_t p = 0; p < inst.universe_size; ++p)
    os << (p % kTermsPerLine == 0 ? (p ? "\n X" : " X") : " X") << p;
  os << "\nEnd\n";
  return os.str();
}

void export_lp(const HittingInstance& inst, const PointSet& forced, LpMode mode, const std::filesystem::path& path) {
  const auto text = lp_model(inst, forced, mode);
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << text;
  if (!out) throw ResourceError("write failed for " + path.string());
}

}  // namespace ovoid
