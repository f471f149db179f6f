#include "residua/report.hpp"

#include <json.hpp>

#include "residua/pretty.hpp"

namespace residua {

using nlohmann::json;

namespace {

const char* disposition_name(Disposition d) {
  switch (d) {
    case Disposition::Kept: return "kept";
    case Disposition::Simplified: return "simplified";
    case Disposition::Removed: return "removed";
  }
  return "?";
}

json key_to_json(const SpecKey& key) {
  json j;
  j["knowns"] = json::array();
  for (const auto& [slot, lit] : key.knowns) j["knowns"].push_back({slot, lit});
  j["alias_groups"] = key.alias_groups;
  return j;
}

}  // namespace

std::string report_to_json(const Report& report, const Program& original,
                           const Program& residual) {
  json j;
  j["schema"] = "residua-report/1";

  j["units"] = json::array();
  for (const auto& u : original.units) {
    json ju;
    ju["name"] = u.name;
    ju["file"] = u.source_file;
    ju["original_statements"] = count_stmts(u.body);
    json variants = json::array();
    bool reachable = false;
    for (const auto& v : report.variants) {
      if (v.origin == u.name) {
        variants.push_back(v.name);
        reachable = true;
      }
    }
    ju["variants"] = variants;
    ju["reachable"] = reachable;
    const Unit* ru = residual.find_unit(u.name);
    if (ru) ju["residual_statements"] = count_stmts(ru->body);
    else ju["residual_statements"] = json();
    j["units"].push_back(ju);
  }

  j["variants"] = json::array();
  for (const auto& v : report.variants) {
    json jv;
    jv["name"] = v.name;
    jv["origin"] = v.origin;
    jv["key"] = key_to_json(v.key);
    jv["cache_hits"] = v.cache_hits;
    j["variants"].push_back(jv);
  }

  // ProvId -> per-variant disposition list (a statement can appear in
  // several specialized variants of its unit)
  j["statements"] = json::object();
  for (const auto& v : report.variants) {
    for (const auto& [prov, rec] : v.stmts) {
      json e;
      e["variant"] = v.name;
      e["disposition"] = disposition_name(rec.disposition);
      e["old"] = rec.old_text;
      if (rec.disposition == Disposition::Simplified) e["new"] = rec.new_text;
      if (rec.disposition == Disposition::Removed) e["reason"] = rec.reason;
      j["statements"][std::to_string(prov)].push_back(e);
    }
  }

  j["bindings"] = json::object();
  for (const auto& v : report.variants) {
    json b = json::array();
    for (const auto& [loc, lit] : v.entry_bindings) b.push_back({loc, lit});
    j["bindings"][v.name] = b;
  }

  j["facts_fired"] = json::array();
  for (const auto& f : report.facts_fired) {
    json e;
    e["variant"] = f.variant;
    e["prov"] = f.prov;
    e["fact"] = f.fact;
    j["facts_fired"].push_back(e);
  }

  j["notes"] = report.notes;
  j["unreachable_units"] = report.unreachable_units;
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_report_json(const std::string& json_text) {
  std::vector<std::string> problems;
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) {
    problems.push_back("not valid JSON");
    return problems;
  }
  auto need = [&](const char* key, bool ok) {
    if (!j.contains(key))
      problems.push_back(std::string("missing top-level key '") + key + "'");
    else if (!ok)
      problems.push_back(std::string("wrong type for top-level key '") + key + "'");
  };
  need("schema", j.value("schema", json()).is_string());
  if (j.contains("schema") && j["schema"] != "residua-report/1")
    problems.push_back("unknown schema version");
  need("units", j.contains("units") && j["units"].is_array());
  need("variants", j.contains("variants") && j["variants"].is_array());
  need("statements", j.contains("statements") && j["statements"].is_object());
  need("bindings", j.contains("bindings") && j["bindings"].is_object());
  need("facts_fired", j.contains("facts_fired") && j["facts_fired"].is_array());
  need("notes", j.contains("notes") && j["notes"].is_array());
  if (!problems.empty()) return problems;

  for (const auto& u : j["units"]) {
    for (const char* k : {"name", "file"}) {
      if (!u.contains(k) || !u[k].is_string())
        problems.push_back("unit entry missing string '" + std::string(k) + "'");
    }
    if (!u.contains("original_statements") || !u["original_statements"].is_number())
      problems.push_back("unit entry missing number 'original_statements'");
    if (!u.contains("variants") || !u["variants"].is_array())
      problems.push_back("unit entry missing array 'variants'");
  }
  for (const auto& v : j["variants"]) {
    for (const char* k : {"name", "origin"}) {
      if (!v.contains(k) || !v[k].is_string())
        problems.push_back("variant entry missing string '" + std::string(k) + "'");
    }
    if (!v.contains("key") || !v["key"].is_object())
      problems.push_back("variant entry missing object 'key'");
    if (!v.contains("cache_hits") || !v["cache_hits"].is_number())
      problems.push_back("variant entry missing number 'cache_hits'");
  }
  for (const auto& [prov, list] : j["statements"].items()) {
    if (!list.is_array()) {
      problems.push_back("statements." + prov + " is not an array");
      continue;
    }
    for (const auto& e : list) {
      if (!e.contains("variant") || !e.contains("disposition")) {
        problems.push_back("statements." + prov + " entry missing keys");
        continue;
      }
      std::string d = e["disposition"];
      if (d != "kept" && d != "simplified" && d != "removed")
        problems.push_back("statements." + prov + " has unknown disposition " + d);
      if (d == "removed" && !e.contains("reason"))
        problems.push_back("statements." + prov + " removed without reason");
      if (d == "simplified" && !e.contains("new"))
        problems.push_back("statements." + prov + " simplified without new text");
    }
  }
  return problems;
}

// ---- HTML ----

namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kStyle =
    "body{font-family:monospace;margin:1em}"
    "table.sxs{border-collapse:collapse;width:100%}"
    "table.sxs td{vertical-align:top;width:50%;border:1px solid #ccc;padding:.5em}"
    "pre{margin:0}"
    "del{color:#a00}"
    ".removed{color:#a00;text-decoration:line-through}"
    ".reason{color:#888;font-style:italic}"
    "h2{border-bottom:1px solid #888}"
    "a{text-decoration:none}";

struct LineSink {
  std::string text;
  void line(int depth, const std::string& html) {
    text.append(static_cast<size_t>(depth) * 2, ' ');
    text += html;
    text += '\n';
  }
};

// Original pane: every line anchored by ProvId; statements the variant
// removed are struck through with their reason.
void original_pane(const Body& body, const VariantRecord* rec, int depth, LineSink& out) {
  for (const auto& s : body) {
    for (const auto& c : s->comments) out.line(depth, escape("! " + c));
    const StmtRecord* sr = nullptr;
    if (rec) {
      auto it = rec->stmts.find(s->prov);
      if (it != rec->stmts.end()) sr = &it->second;
    }
    std::string text = escape(stmt_header_text(*s));
    std::string anchor = "p" + std::to_string(s->prov);
    if (sr && sr->disposition == Disposition::Removed) {
      out.line(depth, "<span id=\"" + anchor + "\" class=\"removed\" title=\"" +
                          escape(sr->reason) + "\">" + text +
                          "</span> <span class=\"reason\">(" + escape(sr->reason) +
                          ")</span>");
    } else {
      out.line(depth, "<span id=\"" + anchor + "\">" + text + "</span>");
    }
    if (s->kind == Stmt::Kind::If) {
      original_pane(s->then_body, rec, depth + 1, out);
      if (!s->else_body.empty()) {
        out.line(depth, "ELSE");
        original_pane(s->else_body, rec, depth + 1, out);
      }
      out.line(depth, "END IF");
    } else if (s->kind == Stmt::Kind::DoLoop || s->kind == Stmt::Kind::DoWhile) {
      original_pane(s->body, rec, depth + 1, out);
      out.line(depth, "END DO");
    }
  }
}

// Residual pane: each line links back to its original statement; CALL
// and function references link to the callee's unit page.
void residual_pane(const Body& body, const Report& report, int depth, LineSink& out) {
  for (const auto& s : body) {
    for (const auto& c : s->comments) out.line(depth, escape("! " + c));
    std::string text = escape(stmt_header_text(*s));
    std::string href = "#p" + std::to_string(s->prov);
    std::string link = "<a href=\"" + href + "\">" + text + "</a>";
    if (s->kind == Stmt::Kind::Call) {
      const VariantRecord* v = report.find_variant(s->callee);
      std::string page = (v ? v->origin : s->callee) + ".html";
      link += " <a href=\"" + page + "\">&rarr;" + escape(s->callee) + "</a>";
    }
    out.line(depth, link);
    if (s->kind == Stmt::Kind::If) {
      residual_pane(s->then_body, report, depth + 1, out);
      if (!s->else_body.empty()) {
        out.line(depth, "ELSE");
        residual_pane(s->else_body, report, depth + 1, out);
      }
      out.line(depth, "END IF");
    } else if (s->kind == Stmt::Kind::DoLoop || s->kind == Stmt::Kind::DoWhile) {
      residual_pane(s->body, report, depth + 1, out);
      out.line(depth, "END DO");
    }
  }
}

std::string page(const std::string& title, const std::string& body) {
  return "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + escape(title) +
         "</title><style>" + kStyle + "</style></head>\n<body>\n<h1>" + escape(title) +
         "</h1>\n" + body + "</body></html>\n";
}

}  // namespace

std::vector<std::pair<std::string, std::string>> report_to_html(
    const Report& report, const Program& original, const Program& residual) {
  std::vector<std::pair<std::string, std::string>> files;

  // index: units table and variant table with specialization keys
  std::string idx;
  idx += "<h2>Units</h2>\n<table class=\"sxs\"><tr><td><b>unit</b></td><td><b>variants"
         "</b></td></tr>\n";
  for (const auto& u : original.units) {
    idx += "<tr><td><a href=\"" + u.name + ".html\">" + escape(u.name) + "</a>";
    bool unreachable = false;
    for (const auto& n : report.unreachable_units)
      if (n == u.name) unreachable = true;
    if (unreachable) idx += " <span class=\"reason\">(unreachable, copied verbatim)</span>";
    idx += "</td><td>";
    bool first = true;
    for (const auto& v : report.variants) {
      if (v.origin != u.name) continue;
      if (!first) idx += ", ";
      idx += "<a href=\"" + u.name + ".html#v_" + v.name + "\">" + escape(v.name) + "</a>";
      first = false;
    }
    idx += "</td></tr>\n";
  }
  idx += "</table>\n<h2>Variants</h2>\n<table class=\"sxs\">"
         "<tr><td><b>variant</b></td><td><b>key / entry bindings</b></td></tr>\n";
  for (const auto& v : report.variants) {
    idx += "<tr><td><a href=\"" + v.origin + ".html#v_" + v.name + "\">" + escape(v.name) +
           "</a> <span class=\"reason\">(from " + escape(v.origin) + ", " +
           std::to_string(v.cache_hits) + " cache hits)</span></td><td>" +
           escape(v.key.str());
    if (!v.entry_bindings.empty()) {
      idx += "<br>";
      for (size_t i = 0; i < v.entry_bindings.size(); ++i) {
        if (i) idx += ", ";
        idx += escape(v.entry_bindings[i].first) + " = " +
               escape(v.entry_bindings[i].second);
      }
    }
    idx += "</td></tr>\n";
  }
  idx += "</table>\n";
  if (!report.facts_fired.empty()) {
    idx += "<h2>Disequality facts fired</h2>\n<ul>\n";
    for (const auto& f : report.facts_fired)
      idx += "<li>" + escape(f.variant) + " @" + std::to_string(f.prov) + ": " +
             escape(f.fact) + "</li>\n";
    idx += "</ul>\n";
  }
  files.emplace_back("index.html", page("residua report", idx));

  // one page per original unit: original/residual panes per variant
  for (const auto& u : original.units) {
    std::string body = "<p><a href=\"index.html\">&larr; index</a></p>\n";
    bool any = false;
    for (const auto& v : report.variants) {
      if (v.origin != u.name) continue;
      any = true;
      const Unit* ru = residual.find_unit(v.name);
      body += "<h2 id=\"v_" + v.name + "\">" + escape(v.name) + " <span class=\"reason\">" +
              escape(v.key.str()) + "</span></h2>\n";
      LineSink orig_sink, resid_sink;
      original_pane(u.body, &v, 0, orig_sink);
      if (ru) residual_pane(ru->body, report, 0, resid_sink);
      body += "<table class=\"sxs\"><tr><td><b>original</b></td><td><b>residual</b>"
              "</td></tr><tr><td><pre>" + orig_sink.text + "</pre></td><td><pre>" +
              resid_sink.text + "</pre></td></tr></table>\n";
    }
    if (!any) {
      LineSink orig_sink;
      original_pane(u.body, nullptr, 0, orig_sink);
      body += "<h2>unreachable (copied verbatim)</h2>\n<pre>" + orig_sink.text +
              "</pre>\n";
    }
    files.emplace_back(u.name + ".html", page(u.name, body));
  }
  return files;
}

}  // namespace residua
