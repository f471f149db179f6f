#pragma once

#include <string>
#include <vector>

#include "residua/ast.hpp"
#include "residua/specialize.hpp"

namespace residua {

/// JSON form of the transformation ledger, schema "residua-report/1":
/// top-level keys schema, units, variants, statements, bindings,
/// facts_fired, notes.
std::string report_to_json(const Report& report, const Program& original,
                           const Program& residual);

/// Structural validation of a serialized report against the published
/// schema. Empty result means valid.
std::vector<std::string> validate_report_json(const std::string& json_text);

/// Static hyperlinked HTML: an index page (units, variants and their
/// keys) plus one page per original unit with side-by-side panes.
/// Removed statements render struck-through in the original pane with
/// their reason; residual lines link back to original anchors; CALL
/// sites link to variant pages. Returns (filename, content) pairs.
std::vector<std::pair<std::string, std::string>> report_to_html(
    const Report& report, const Program& original, const Program& residual);

}  // namespace residua
