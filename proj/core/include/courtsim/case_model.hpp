#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace courtsim {

/// Structured case input driving every agent prompt. Immutable after load;
/// safe to share across threads.
struct CaseFile {
    std::string case_id;
    std::string summary;
    std::vector<std::string> charges;
    std::string law_explanation;
    std::vector<std::string> prosecution_evidence;
    std::vector<std::string> defense_evidence;
    std::vector<std::string> keywords;             // original casing, trimmed
    std::vector<std::string> keywords_normalized;  // lower-cased, for matching

    bool operator==(const CaseFile&) const = default;
};

class CaseFileError : public std::runtime_error {
public:
    enum class Kind { MissingField, EmptyField, Malformed };

    CaseFileError(Kind kind, std::string field, const std::string& message)
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    Kind kind() const { return kind_; }
    const std::string& field() const { return field_; }

private:
    Kind kind_;
    std::string field_;
};

struct CaseViolation {
    std::string field;
    std::string detail;

    bool operator==(const CaseViolation&) const = default;
};

/// Load and validate a case file (UTF-8 JSON, seven fixed fields).
/// Unknown extra fields are ignored; their names are appended to *warnings
/// when provided. Throws CaseFileError on missing/empty fields or malformed
/// input.
CaseFile load_case(const std::filesystem::path& path,
                   std::vector<std::string>* warnings = nullptr);

/// Parse a case from an in-memory JSON document (same contract as load_case).
CaseFile parse_case_json(const std::string& json_text,
                         std::vector<std::string>* warnings = nullptr);

/// Serialize a case back to its on-disk JSON form.
std::string serialize_case(const CaseFile& c);

/// Empty result iff every CaseFile invariant holds; otherwise one descriptor
/// per violated invariant. Never throws.
std::vector<CaseViolation> validate_case(const CaseFile& c);

}  // namespace courtsim
