//! Line-oriented `.lad` text format.
//!
//! ```text
//! # comment
//! vertex u w
//! arc a from u to w reverse b colours 1 2
//! arc b from w to u reverse a colours 1' 2' 3'
//! loop l at w self-reverse colours x
//! arc big from u to u reverse big' colours infinite N
//! action u gens (1 2)
//! action w gens (1' 2' 3'); (1' 2')
//! action v symbolic trivial=false semiregular=true finite_base=true orbits big:big'
//! ray R at u period 1 lead 1
//! segment 0 action trivial out p in q
//! segment 1 action (r s) out r s in t
//! frontier R#3 extra r#4 s#4
//! ```

use std::fmt::Write as _;

use super::{
    ColourSet, Diagram, DiagramBuilder, DiagramError, LocalAction, RaySpec,
    SegmentSpec, SymbolicAction,
};

fn err(line: usize, message: impl Into<String>) -> DiagramError {
    DiagramError::Parse {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev_space = true;
    for (i, ch) in line.char_indices() {
        if ch == '#' && prev_space {
            return &line[..i];
        }
        prev_space = ch.is_whitespace();
    }
    line
}

fn parse_bool(line: usize, key: &str, text: &str) -> Result<bool, DiagramError> {
    let value = text
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| err(line, format!("expected `{key}=<bool>`, found `{text}`")))?;
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(line, format!("`{other}` is not a boolean"))),
    }
}

fn split_generators(text: &str) -> Vec<String> {
    let text = text.trim();
    if text == "trivial" {
        return Vec::new();
    }
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn colour_list(line: usize, tokens: &[&str]) -> Result<ColourSet, DiagramError> {
    match tokens {
        ["infinite", name] => Ok(ColourSet::Infinite((*name).to_string())),
        ["infinite", ..] => Err(err(line, "`infinite` takes exactly one name")),
        _ => Ok(ColourSet::finite(tokens.iter().copied())),
    }
}

struct PendingRay {
    line: usize,
    spec: RaySpec,
    expected: usize,
}

/// Parses `.lad` text. Structural problems that are not syntax errors (orbit
/// mismatches, empty colour sets, asymmetric reversal) load successfully and
/// are reported by [`Diagram::validate`].
pub fn load(text: &str) -> Result<Diagram, DiagramError> {
    let mut builder = DiagramBuilder::new();
    let mut arcs: Vec<(usize, String, String)> = Vec::new();
    let mut pending: Option<PendingRay> = None;

    let finish_ray = |builder: &mut DiagramBuilder, ray: PendingRay| -> Result<(), DiagramError> {
        if ray.spec.segments.len() != ray.expected {
            return Err(err(
                ray.line,
                format!(
                    "ray `{}` declares {} segments, found {}",
                    ray.spec.id,
                    ray.expected,
                    ray.spec.segments.len()
                ),
            ));
        }
        builder.ray(ray.spec);
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let keyword = tokens[0];

        if keyword != "segment" {
            if let Some(ray) = pending.take() {
                finish_ray(&mut builder, ray)?;
            }
        }

        match keyword {
            "vertex" => {
                if tokens.len() < 2 {
                    return Err(err(line, "`vertex` needs at least one id"));
                }
                for v in &tokens[1..] {
                    builder.vertex(*v);
                }
            }
            "arc" => {
                // arc <id> from <v> to <w> reverse <r> colours ...
                if tokens.len() < 9
                    || tokens[2] != "from"
                    || tokens[4] != "to"
                    || tokens[6] != "reverse"
                    || tokens[8] != "colours"
                {
                    return Err(err(
                        line,
                        "expected `arc <id> from <v> to <w> reverse <id> colours ...`",
                    ));
                }
                let colours = colour_list(line, &tokens[9..])?;
                builder.arc(tokens[1], tokens[3], tokens[5], tokens[7], colours);
                arcs.push((line, tokens[1].to_string(), tokens[7].to_string()));
            }
            "loop" => {
                if tokens.len() < 6
                    || tokens[2] != "at"
                    || tokens[4] != "self-reverse"
                    || tokens[5] != "colours"
                {
                    return Err(err(line, "expected `loop <id> at <v> self-reverse colours ...`"));
                }
                let colours = colour_list(line, &tokens[6..])?;
                builder.non_orientable_loop(tokens[1], tokens[3], colours);
                arcs.push((line, tokens[1].to_string(), tokens[1].to_string()));
            }
            "action" => {
                if tokens.len() < 3 {
                    return Err(err(line, "expected `action <v> gens ...` or `action <v> symbolic ...`"));
                }
                let vertex = tokens[1];
                match tokens[2] {
                    "trivial" if tokens.len() == 3 => {
                        builder.generators(vertex, Vec::<String>::new());
                    }
                    "gens" => {
                        let rest = body
                            .splitn(4, char::is_whitespace)
                            .nth(3)
                            .unwrap_or("");
                        builder.generators(vertex, split_generators(rest));
                    }
                    "symbolic" => {
                        if tokens.len() < 7 || tokens[6] != "orbits" {
                            return Err(err(
                                line,
                                "expected `symbolic trivial=.. semiregular=.. finite_base=.. orbits a:b`",
                            ));
                        }
                        let orbits = tokens[7..]
                            .iter()
                            .flat_map(|t| t.split(':'))
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect();
                        builder.symbolic(
                            vertex,
                            SymbolicAction {
                                trivial: parse_bool(line, "trivial", tokens[3])?,
                                semiregular: parse_bool(line, "semiregular", tokens[4])?,
                                finite_base: parse_bool(line, "finite_base", tokens[5])?,
                                orbits,
                            },
                        );
                    }
                    other => return Err(err(line, format!("unknown action form `{other}`"))),
                }
            }
            "ray" => {
                // ray <id> at <v> period <p> [lead <m>]
                let ok = (tokens.len() == 6 || tokens.len() == 8)
                    && tokens[2] == "at"
                    && tokens[4] == "period"
                    && (tokens.len() == 6 || tokens[6] == "lead");
                if !ok {
                    return Err(err(line, "expected `ray <id> at <v> period <p> [lead <m>]`"));
                }
                let period: usize = tokens[5]
                    .parse()
                    .map_err(|_| err(line, format!("bad period `{}`", tokens[5])))?;
                let lead: usize = if tokens.len() == 8 {
                    tokens[7]
                        .parse()
                        .map_err(|_| err(line, format!("bad lead `{}`", tokens[7])))?
                } else {
                    0
                };
                if period == 0 {
                    return Err(err(line, "period must be at least 1"));
                }
                pending = Some(PendingRay {
                    line,
                    spec: RaySpec {
                        id: tokens[1].to_string(),
                        attach: tokens[3].to_string(),
                        lead,
                        segments: Vec::new(),
                    },
                    expected: lead + period,
                });
            }
            "segment" => {
                let ray = pending
                    .as_mut()
                    .ok_or_else(|| err(line, "`segment` outside a ray"))?;
                let index: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line, "expected `segment <k> action ...`"))?;
                if index != ray.spec.segments.len() {
                    return Err(err(
                        line,
                        format!("expected segment {}, found {index}", ray.spec.segments.len()),
                    ));
                }
                if tokens.get(2) != Some(&"action") {
                    return Err(err(line, "expected `action` after the segment index"));
                }
                let out_at = tokens
                    .iter()
                    .position(|t| *t == "out")
                    .ok_or_else(|| err(line, "segment without `out`"))?;
                let in_at = tokens
                    .iter()
                    .position(|t| *t == "in")
                    .filter(|&i| i > out_at)
                    .ok_or_else(|| err(line, "segment without `in` after `out`"))?;
                let gens = split_generators(&tokens[3..out_at].join(" "));
                ray.spec.segments.push(SegmentSpec {
                    generators: gens,
                    out: tokens[out_at + 1..in_at].iter().map(|s| s.to_string()).collect(),
                    inward: tokens[in_at + 1..].iter().map(|s| s.to_string()).collect(),
                });
            }
            "frontier" => {
                if tokens.len() < 2 {
                    return Err(err(line, "expected `frontier <v> [extra <colours>]`"));
                }
                let extra = match tokens.get(2) {
                    None => Vec::new(),
                    Some(&"extra") => tokens[3..].iter().map(|s| s.to_string()).collect(),
                    Some(other) => return Err(err(line, format!("unexpected `{other}`"))),
                };
                builder.frontier(tokens[1], extra);
            }
            other => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some(ray) = pending.take() {
        finish_ray(&mut builder, ray)?;
    }

    let declared: std::collections::HashSet<&str> =
        arcs.iter().map(|(_, id, _)| id.as_str()).collect();
    for (line, id, reverse) in &arcs {
        if !declared.contains(reverse.as_str()) {
            return Err(err(
                *line,
                format!("arc `{id}` names undeclared reverse `{reverse}`"),
            ));
        }
    }

    builder.build().map_err(|e| match e {
        DiagramError::Graph(g) => err(0, g.to_string()),
        other => other,
    })
}

fn colours_text(set: &ColourSet) -> String {
    match set {
        ColourSet::Finite(c) => c.join(" "),
        ColourSet::Infinite(name) => format!("infinite {name}"),
    }
}

/// Canonical text form; `load(&save(d))` reproduces `d`.
pub fn save(d: &Diagram) -> String {
    let g = d.graph();
    let mut out = String::new();
    for v in g.vertices() {
        let _ = writeln!(out, "vertex {v}");
    }
    for (a, arc) in g.arcs().iter().enumerate() {
        if g.is_non_orientable_loop(a) {
            let _ = writeln!(
                out,
                "loop {} at {} self-reverse colours {}",
                arc.id,
                g.vertex_name(arc.origin),
                colours_text(d.colour_set(a))
            );
        } else {
            let _ = writeln!(
                out,
                "arc {} from {} to {} reverse {} colours {}",
                arc.id,
                g.vertex_name(arc.origin),
                g.vertex_name(arc.terminus),
                g.arc_name(arc.reverse),
                colours_text(d.colour_set(a))
            );
        }
    }
    for v in 0..d.vertex_count() {
        let name = g.vertex_name(v);
        match d.action(v) {
            None => {}
            Some(LocalAction::Explicit(group)) => {
                if group.is_trivial() {
                    let _ = writeln!(out, "action {name} trivial");
                } else {
                    let _ = writeln!(out, "action {name} gens {}", group.generators_to_string());
                }
            }
            Some(LocalAction::Symbolic(s)) => {
                let _ = writeln!(
                    out,
                    "action {name} symbolic trivial={} semiregular={} finite_base={} orbits {}",
                    s.trivial,
                    s.semiregular,
                    s.finite_base,
                    s.orbits.join(":")
                );
            }
        }
    }
    for ray in d.rays() {
        let _ = write!(
            out,
            "ray {} at {} period {}",
            ray.id,
            g.vertex_name(ray.attach),
            ray.period()
        );
        if ray.lead > 0 {
            let _ = write!(out, " lead {}", ray.lead);
        }
        out.push('\n');
        for (k, seg) in ray.segments.iter().enumerate() {
            let gens = if seg.action.is_trivial() {
                "trivial".to_string()
            } else {
                seg.action.generators_to_string()
            };
            let _ = writeln!(
                out,
                "segment {k} action {gens} out {} in {}",
                seg.out.join(" "),
                seg.inward.join(" ")
            );
        }
    }
    for v in 0..d.vertex_count() {
        if d.is_frontier(v) {
            let extra = d.dangling_colours(v);
            if extra.is_empty() {
                let _ = writeln!(out, "frontier {}", g.vertex_name(v));
            } else {
                let _ = writeln!(out, "frontier {} extra {}", g.vertex_name(v), extra.join(" "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const TWO_VERTEX: &str = "\
# S2 on one side, A3 on the other
vertex u w
arc a from u to w reverse b colours 1 2
arc b from w to u reverse a colours 1' 2' 3'
action u gens (1 2)
action w gens (1' 2' 3')
";

    #[test]
    fn loads_two_vertex_example() {
        let d = load(TWO_VERTEX).unwrap();
        assert_eq!(d.vertex_count(), 2);
        assert!(d.is_valid());
    }

    #[test]
    fn undeclared_reverse_is_a_parse_error_with_line() {
        let text = "vertex u\narc a from u to u reverse zz colours 1\n";
        match load(text) {
            Err(DiagramError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keyword_is_reported() {
        assert!(matches!(
            load("vertex v\nedge a\n"),
            Err(DiagramError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn corpus_round_trips() {
        for entry in corpus::all() {
            let d = entry.diagram();
            let text = save(&d);
            let back = load(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", entry.name));
            assert_eq!(back, d, "{}", entry.name);
        }
    }

    #[test]
    fn truncated_diagrams_round_trip() {
        for entry in corpus::all() {
            let d = entry.diagram().truncate_rays(2);
            let back = load(&save(&d)).unwrap();
            assert_eq!(back, d, "{}", entry.name);
        }
    }

    #[test]
    fn symbolic_action_parses() {
        let text = "\
vertex v
arc big from v to v reverse big' colours infinite N
arc big' from v to v reverse big colours infinite M
action v symbolic trivial=false semiregular=true finite_base=true orbits big:big'
";
        let d = load(text).unwrap();
        assert!(d.is_valid(), "{:?}", d.validate());
        assert_eq!(load(&save(&d)).unwrap(), d);
    }
}
