#pragma once

#include <memory>
#include <string>
#include <vector>

#include "strmach/analysis.hpp"

namespace strmach {

// A machine-definition document: tape categories, transducers, machines and
// families, fully validated on load. Serialization is canonical (sorted
// keys, two-space indent), so parse-then-serialize is idempotent.
struct DefinitionDocument {
    std::vector<std::shared_ptr<const TapeCategory>> tape_categories;
    std::vector<TransducerPtr> transducers;
    std::vector<MachinePtr> machines;
    std::vector<FamilySpec> families;

    std::shared_ptr<const TapeCategory> tape_category(std::string_view name) const;
    TransducerPtr transducer(std::string_view name) const;
    MachinePtr machine(std::string_view name) const;
    const FamilySpec& family(std::string_view name) const;
};

DefinitionDocument parse_document(const std::string& text);
std::string serialize_document(const DefinitionDocument& doc);
DefinitionDocument load_document_file(const std::string& path);

}  // namespace strmach
