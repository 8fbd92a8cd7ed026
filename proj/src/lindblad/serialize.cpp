#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "dpt/errors.hpp"
#include "dpt/lindblad.hpp"

namespace dpt::lindblad {
namespace {

constexpr char kMagic[8] = {'D', 'P', 'T', 'S', 'T', 'A', 'T', '1'};
static_assert(std::endian::native == std::endian::little, "container assumes a little-endian host");

nlohmann::json params_json(const ModelParams& p) {
  return {{"model", std::string(to_string(p.model))},
          {"vx", p.vx},
          {"vy", p.vy},
          {"omega", p.omega},
          {"gamma_i", p.gamma_i},
          {"gamma_c", p.gamma_c},
          {"n_atoms", p.n_atoms}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.model = model_from_string(j.at("model").get<std::string>());
  p.vx = j.at("vx").get<double>();
  p.vy = j.at("vy").get<double>();
  p.omega = j.at("omega").get<double>();
  p.gamma_i = j.at("gamma_i").get<double>();
  p.gamma_c = j.at("gamma_c").get<double>();
  p.n_atoms = j.at("n_atoms").get<int>();
  return p;
}

}  // namespace

void write_states(const std::string& path, const StateFile& file) {
  if (file.states.empty()) throw InvalidParameter("nothing to write");
  if (!file.times.empty() && file.times.size() != file.states.size()) {
    throw InvalidParameter("times and states differ in length");
  }
  const DensityMatrix& first = file.states.front();
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t k = 0; k < first.blocks.size(); ++k) {
    blocks.push_back({{"j2", first.spins[k].twice}, {"dim", first.blocks[k].rows()}});
  }
  for (const auto& s : file.states) {
    if (s.tag != first.tag || s.n_atoms != first.n_atoms || s.blocks.size() != first.blocks.size()) {
      throw BasisMismatch("all states in one file must share a basis");
    }
    for (std::size_t k = 0; k < s.blocks.size(); ++k)
      if (s.blocks[k].rows() != first.blocks[k].rows()) throw BasisMismatch("block sizes differ");
  }
  const nlohmann::json header = {
      {"format", 1},
      {"basis", to_string(first.tag)},
      {"n_atoms", first.n_atoms},
      {"params", params_json(file.params)},
      {"tolerances", {{"rtol", file.tolerances.rtol}, {"atol", file.tolerances.atol}}},
      {"blocks", blocks},
      {"count", file.states.size()},
      {"times", file.times},
      {"layout", "row-major complex128 (re, im), blocks in order, states in order"},
      {"note", file.note}};
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidParameter("cannot open " + path + " for writing");
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  std::vector<double> row;
  for (const auto& s : file.states) {
    for (const auto& b : s.blocks) {
      row.resize(2 * static_cast<std::size_t>(b.cols()));
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        for (Eigen::Index c = 0; c < b.cols(); ++c) {
          row[2 * c] = b(r, c).real();
          row[2 * c + 1] = b(r, c).imag();
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
      }
    }
  }
  if (!out) throw InvalidParameter("write failed for " + path);
}

StateFile read_states(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw InvalidParameter(path + ": not a state container");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1u << 30)) throw InvalidParameter(path + ": bad header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  const nlohmann::json h = nlohmann::json::parse(text);

  StateFile f;
  f.params = params_from_json(h.at("params"));
  f.tolerances = {h.at("tolerances").at("rtol").get<double>(), h.at("tolerances").at("atol").get<double>()};
  f.times = h.at("times").get<std::vector<double>>();
  f.note = h.value("note", "");
  const BasisTag tag = basis_from_string(h.at("basis").get<std::string>());
  const int n = h.at("n_atoms").get<int>();
  const std::size_t count = h.at("count").get<std::size_t>();

  DensityMatrix layout;
  layout.tag = tag;
  layout.n_atoms = n;
  for (const auto& b : h.at("blocks")) {
    layout.spins.push_back(HalfInt(b.at("j2").get<int>()));
    const auto dim = b.at("dim").get<Eigen::Index>();
    layout.blocks.push_back(Matrix::Zero(dim, dim));
  }
  std::vector<double> row;
  for (std::size_t s = 0; s < count; ++s) {
    DensityMatrix st = layout;
    for (auto& b : st.blocks) {
      row.resize(2 * static_cast<std::size_t>(b.cols()));
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw InvalidParameter(path + ": truncated data");
        for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = cplx(row[2 * c], row[2 * c + 1]);
      }
    }
    f.states.push_back(std::move(st));
  }
  return f;
}

}  // namespace dpt::lindblad
