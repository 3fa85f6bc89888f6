//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_STRUCTIO_HPP_
#define IPBIND_CORE_STRUCTIO_HPP_

#include <array>
#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ipbind {

constexpr int kMaxAtomicNumber = 118;

// Returns 0 when the symbol is not a known element. Matching is
// case-insensitive; "D" and "T" map to hydrogen.
int atomic_number_from_symbol(std::string_view symbol);
std::string_view element_symbol(int atomic_number);

struct ResidueId {
  char chain = ' ';
  int seq = 0;

  auto operator<=>(const ResidueId &) const = default;
};

enum class AtomSource { kProtein, kLigand };
enum class StructureKind { kProtein, kLigand, kComplex };

struct AtomRecord {
  int atomic_number = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<ResidueId> residue;
  AtomSource source = AtomSource::kProtein;
  // Informational only; PDB atom / residue names when available.
  std::string atom_name;
  std::string residue_name;

  std::string_view element() const { return element_symbol(atomic_number); }
};

struct MolecularStructure {
  std::vector<AtomRecord> atoms;
  StructureKind kind = StructureKind::kProtein;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
  Eigen::MatrixX3d coordinates() const;
  std::vector<int> atomic_numbers() const;
};

struct PocketComplex {
  MolecularStructure protein_pocket;
  MolecularStructure ligand;
  MolecularStructure complex;
  std::optional<double> label;
};

// Heavy ATOM records only, in file order. HETATM, waters, alternate
// locations other than blank/'A' and residues with insertion codes are
// skipped. Throws DataError naming the offending line.
MolecularStructure parse_protein(std::string_view pdb_text);

// First molecule of an SDF / MOL V2000 file; heavy atoms only, bonds ignored.
MolecularStructure parse_ligand(std::string_view sdf_text);

// Keeps the max_residues residues nearest the ligand by minimum heavy-atom
// pair distance (ties: earlier residue in file order wins), then assembles
// the complex as pocket atoms followed by ligand atoms.
PocketComplex crop_pocket(const MolecularStructure &protein,
                          const MolecularStructure &ligand,
                          int max_residues = 50);

// Assembles a complex without cropping; used for already-cropped inputs.
PocketComplex make_complex(MolecularStructure pocket, MolecularStructure ligand,
                           std::optional<double> label = std::nullopt);

enum class Split { kTrain, kVal, kTest };
std::string_view split_name(Split split);
std::optional<Split> parse_split(std::string_view name);

struct ManifestEntry {
  std::string id;
  std::filesystem::path protein;
  std::filesystem::path ligand;
  std::optional<double> label;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry *> select(Split split) const;
};

// CSV with header "id,protein,ligand,label,split". Relative structure paths
// are resolved against the manifest's directory. Referenced files are not
// opened here.
DatasetManifest load_manifest(const std::filesystem::path &path);
DatasetManifest parse_manifest(std::string_view csv_text,
                               const std::filesystem::path &base_dir = {});

std::string read_text_file(const std::filesystem::path &path);

// Reads and crops one manifest entry.
PocketComplex load_entry(const ManifestEntry &entry, int max_residues = 50);

// Debug writers. write_pdb emits fixed-column ATOM records (3-decimal
// coordinates); b_factors, when given, must match the atom count.
std::string write_pdb(const MolecularStructure &structure,
                      const std::vector<double> *b_factors = nullptr);
std::string write_sdf(const MolecularStructure &structure,
                      std::string_view title = "ligand");

} // namespace ipbind

#endif // IPBIND_CORE_STRUCTIO_HPP_
