//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "structio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "error.hpp"
#include "text_util.hpp"

namespace ipbind {
namespace {
using internal::column;
using internal::parse_number;
using internal::split_lines;
using internal::trim;

constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
  "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
  "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
  "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
  "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
  "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
  "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
  "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
  "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
  "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

std::string line_error(std::string_view kind, std::size_t line_no,
                       std::string_view what) {
  std::ostringstream os;
  os << kind << " line " << line_no << ": " << what;
  return os.str();
}

bool is_finite(const Eigen::Vector3d &v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

// Element from cols 77-78, falling back to the atom name when blank.
std::string_view pdb_element_field(std::string_view line) {
  auto elem = trim(column(line, 76, 2));
  if (!elem.empty())
    return elem;
  auto name = column(line, 12, 4);
  if (name.size() < 2)
    return trim(name);
  if (name[0] == ' ' || std::isdigit(static_cast<unsigned char>(name[0])))
    return name.substr(1, 1);
  return name.substr(0, 2);
}

bool is_hydrogen(int z) { return z == 1; }
} // namespace

int atomic_number_from_symbol(std::string_view symbol) {
  symbol = trim(symbol);
  if (symbol.empty() || symbol.size() > 2)
    return 0;
  std::string norm(symbol);
  norm[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(norm[0])));
  if (norm.size() == 2)
    norm[1] =
        static_cast<char>(std::tolower(static_cast<unsigned char>(norm[1])));
  if (norm == "D" || norm == "T")
    return 1;
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[z] == norm)
      return z;
  }
  return 0;
}

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 1 || atomic_number > kMaxAtomicNumber)
    return "";
  return kSymbols[atomic_number];
}

Eigen::MatrixX3d MolecularStructure::coordinates() const {
  Eigen::MatrixX3d x(static_cast<Eigen::Index>(atoms.size()), 3);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) = atoms[i].position.transpose();
  return x;
}

std::vector<int> MolecularStructure::atomic_numbers() const {
  std::vector<int> z;
  z.reserve(atoms.size());
  for (const auto &a : atoms)
    z.push_back(a.atomic_number);
  return z;
}

MolecularStructure parse_protein(std::string_view pdb_text) {
  MolecularStructure out;
  out.kind = StructureKind::kProtein;

  const auto lines = split_lines(pdb_text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto line = lines[li];
    const std::size_t line_no = li + 1;
    if (column(line, 0, 6) != "ATOM  " && trim(column(line, 0, 6)) != "ATOM")
      continue;
    if (line.size() < 54)
      throw DataError(
          line_error("PDB", line_no, "ATOM record shorter than 54 columns"));

    const char altloc = line[16];
    if (altloc != ' ' && altloc != 'A')
      continue;
    if (line[26] != ' ')
      continue;
    const auto res_name = trim(column(line, 17, 3));
    if (res_name == "HOH" || res_name == "WAT")
      continue;

    Eigen::Vector3d pos;
    for (int k = 0; k < 3; ++k) {
      auto v = parse_number<double>(column(line, 30 + 8 * k, 8));
      if (!v)
        throw DataError(line_error("PDB", line_no,
                                   "malformed coordinate field '" +
                                       std::string(column(line, 30 + 8 * k, 8)) +
                                       "'"));
      pos[k] = *v;
    }
    if (!is_finite(pos))
      throw DataError(line_error("PDB", line_no, "non-finite coordinate"));

    auto seq = parse_number<int>(column(line, 22, 4));
    if (!seq)
      throw DataError(
          line_error("PDB", line_no, "malformed residue sequence number"));

    const auto elem = pdb_element_field(line);
    const int z = atomic_number_from_symbol(elem);
    if (z == 0)
      throw DataError(line_error("PDB", line_no,
                                 "unknown element symbol '" +
                                     std::string(elem) + "'"));
    if (is_hydrogen(z))
      continue;

    AtomRecord atom;
    atom.atomic_number = z;
    atom.position = pos;
    atom.residue = ResidueId { line[21], *seq };
    atom.source = AtomSource::kProtein;
    atom.atom_name = std::string(trim(column(line, 12, 4)));
    atom.residue_name = std::string(res_name);
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

MolecularStructure parse_ligand(std::string_view sdf_text) {
  MolecularStructure out;
  out.kind = StructureKind::kLigand;

  const auto lines = split_lines(sdf_text);
  if (lines.size() < 4)
    throw DataError("SDF: missing header or counts line");
  const auto counts = lines[3];
  if (counts.find("V3000") != std::string_view::npos)
    throw DataError("SDF line 4: V3000 connection tables are not supported");
  auto natoms = parse_number<int>(column(counts, 0, 3));
  if (!natoms || *natoms < 0)
    throw DataError("SDF line 4: malformed atom count");

  for (int i = 0; i < *natoms; ++i) {
    const std::size_t li = 4 + static_cast<std::size_t>(i);
    auto mismatch = [&] {
      std::ostringstream os;
      os << "SDF: atom count mismatch, counts line declares " << *natoms
         << " atoms but the atom block has " << i;
      return DataError(os.str());
    };
    if (li >= lines.size())
      throw mismatch();
    const auto line = lines[li];
    if (line.starts_with("M  END") || line.starts_with("$$$$"))
      throw mismatch();

    Eigen::Vector3d pos;
    bool ok = line.size() >= 31;
    for (int k = 0; ok && k < 3; ++k) {
      auto v = parse_number<double>(column(line, 10 * k, 10));
      ok = v.has_value();
      if (ok)
        pos[k] = *v;
    }
    if (!ok)
      throw mismatch();
    if (!is_finite(pos))
      throw DataError(line_error("SDF", li + 1, "non-finite coordinate"));

    const auto sym = trim(column(line, 31, 3));
    const int z = atomic_number_from_symbol(sym);
    if (z == 0)
      throw DataError(line_error(
          "SDF", li + 1, "unknown element symbol '" + std::string(sym) + "'"));
    if (is_hydrogen(z))
      continue;

    AtomRecord atom;
    atom.atomic_number = z;
    atom.position = pos;
    atom.source = AtomSource::kLigand;
    atom.atom_name = std::string(sym);
    atom.residue_name = "LIG";
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

PocketComplex make_complex(MolecularStructure pocket, MolecularStructure ligand,
                           std::optional<double> label) {
  PocketComplex pc;
  pocket.kind = StructureKind::kProtein;
  ligand.kind = StructureKind::kLigand;
  for (auto &a : pocket.atoms)
    a.source = AtomSource::kProtein;
  for (auto &a : ligand.atoms)
    a.source = AtomSource::kLigand;
  pc.complex.kind = StructureKind::kComplex;
  pc.complex.atoms = pocket.atoms;
  pc.complex.atoms.insert(pc.complex.atoms.end(), ligand.atoms.begin(),
                          ligand.atoms.end());
  pc.protein_pocket = std::move(pocket);
  pc.ligand = std::move(ligand);
  pc.label = label;
  return pc;
}

PocketComplex crop_pocket(const MolecularStructure &protein,
                          const MolecularStructure &ligand, int max_residues) {
  if (protein.empty())
    throw DataError("crop_pocket: protein has no heavy atoms");
  if (ligand.empty())
    throw DataError("crop_pocket: ligand has no heavy atoms");
  if (max_residues < 1)
    throw UsageError("crop_pocket: max_residues must be positive");

  // Residues in order of first appearance.
  std::map<ResidueId, std::size_t> index_of;
  std::vector<double> min_d2;
  std::vector<std::size_t> residue_of_atom(protein.atoms.size());
  for (std::size_t i = 0; i < protein.atoms.size(); ++i) {
    const auto &atom = protein.atoms[i];
    const ResidueId rid = atom.residue.value_or(ResidueId {});
    auto [it, inserted] = index_of.try_emplace(rid, min_d2.size());
    if (inserted)
      min_d2.push_back(std::numeric_limits<double>::infinity());
    residue_of_atom[i] = it->second;

    double best = min_d2[it->second];
    for (const auto &lig : ligand.atoms)
      best = std::min(best, (atom.position - lig.position).squaredNorm());
    min_d2[it->second] = best;
  }

  std::vector<std::size_t> order(min_d2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return min_d2[a] < min_d2[b];
                   });
  const std::size_t keep =
      std::min(order.size(), static_cast<std::size_t>(max_residues));
  std::vector<char> kept(min_d2.size(), 0);
  for (std::size_t k = 0; k < keep; ++k)
    kept[order[k]] = 1;

  MolecularStructure pocket;
  pocket.kind = StructureKind::kProtein;
  for (std::size_t i = 0; i < protein.atoms.size(); ++i) {
    if (kept[residue_of_atom[i]])
      pocket.atoms.push_back(protein.atoms[i]);
  }
  return make_complex(std::move(pocket), ligand);
}

std::string_view split_name(Split split) {
  switch (split) {
  case Split::kTrain:
    return "train";
  case Split::kVal:
    return "val";
  case Split::kTest:
    return "test";
  }
  return "";
}

std::optional<Split> parse_split(std::string_view name) {
  name = trim(name);
  if (name == "train")
    return Split::kTrain;
  if (name == "val")
    return Split::kVal;
  if (name == "test")
    return Split::kTest;
  return std::nullopt;
}

std::vector<const ManifestEntry *> DatasetManifest::select(Split split) const {
  std::vector<const ManifestEntry *> out;
  for (const auto &e : entries) {
    if (e.split == split)
      out.push_back(&e);
  }
  return out;
}

DatasetManifest parse_manifest(std::string_view csv_text,
                               const std::filesystem::path &base_dir) {
  const auto lines = split_lines(csv_text);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty())
    ++li;
  if (li == lines.size() || trim(lines[li]) != "id,protein,ligand,label,split")
    throw DataError(
        "manifest: expected header 'id,protein,ligand,label,split'");

  DatasetManifest manifest;
  std::set<std::string, std::less<>> seen;
  for (++li; li < lines.size(); ++li) {
    const auto line = trim(lines[li]);
    if (line.empty())
      continue;
    const auto fields = internal::split(line, ',');
    if (fields.size() != 5)
      throw DataError(line_error("manifest", li + 1, "expected 5 fields"));

    ManifestEntry e;
    e.id = std::string(trim(fields[0]));
    if (e.id.empty())
      throw DataError(line_error("manifest", li + 1, "empty id"));
    if (!seen.insert(e.id).second)
      throw DataError("manifest: duplicate complex id '" + e.id + "'");

    auto resolve = [&](std::string_view p) {
      std::filesystem::path path {std::string(trim(p))};
      if (path.is_relative() && !base_dir.empty())
        path = base_dir / path;
      return path;
    };
    e.protein = resolve(fields[1]);
    e.ligand = resolve(fields[2]);

    const auto label = trim(fields[3]);
    if (!label.empty()) {
      auto v = parse_number<double>(label);
      if (!v || !std::isfinite(*v))
        throw DataError(line_error("manifest", li + 1,
                                   "label is not a finite number"));
      e.label = *v;
    }
    auto split = parse_split(fields[4]);
    if (!split)
      throw DataError(line_error("manifest", li + 1,
                                 "split must be one of train, val, test"));
    e.split = *split;
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DatasetManifest load_manifest(const std::filesystem::path &path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

PocketComplex load_entry(const ManifestEntry &entry, int max_residues) {
  try {
    auto protein = parse_protein(read_text_file(entry.protein));
    auto ligand = parse_ligand(read_text_file(entry.ligand));
    auto pc = crop_pocket(protein, ligand, max_residues);
    pc.label = entry.label;
    return pc;
  } catch (const DataError &e) {
    throw DataError("complex '" + entry.id + "': " + e.what());
  }
}

std::string write_pdb(const MolecularStructure &structure,
                      const std::vector<double> *b_factors) {
  if (b_factors != nullptr && b_factors->size() != structure.atoms.size())
    throw UsageError("write_pdb: b-factor count does not match atom count");

  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < structure.atoms.size(); ++i) {
    const auto &a = structure.atoms[i];
    const auto elem = a.element();
    std::string name = a.atom_name.empty() ? std::string(elem) : a.atom_name;
    if (name.size() < 4 && elem.size() == 1)
      name = " " + name;
    const ResidueId rid = a.residue.value_or(ResidueId { 'L', 1 });
    const std::string res =
        a.residue_name.empty() ? std::string("UNK") : a.residue_name;
    double b = b_factors ? (*b_factors)[i] : 0.0;
    b = std::clamp(b, -99.99, 999.99);
    const bool het = a.source == AtomSource::kLigand;
    std::snprintf(buf, sizeof buf,
                  "%-6s%5d %-4.4s %3.3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f"
                  "          %2.2s\n",
                  het ? "HETATM" : "ATOM", static_cast<int>(i + 1) % 100000,
                  name.c_str(), res.c_str(), rid.chain, rid.seq % 10000,
                  a.position.x(), a.position.y(), a.position.z(), 1.0, b,
                  std::string(elem).c_str());
    out += buf;
  }
  out += "END\n";
  return out;
}

std::string write_sdf(const MolecularStructure &structure,
                      std::string_view title) {
  std::string out;
  out += std::string(title) + "\n  ipbind\n\n";
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                static_cast<int>(structure.atoms.size()), 0);
  out += buf;
  for (const auto &a : structure.atoms) {
    std::snprintf(buf, sizeof buf,
                  "%10.4f%10.4f%10.4f %-3s 0  0  0  0  0  0  0  0  0  0  0  0\n",
                  a.position.x(), a.position.y(), a.position.z(),
                  std::string(a.element()).c_str());
    out += buf;
  }
  out += "M  END\n$$$$\n";
  return out;
}

} // namespace ipbind
