//! Export of the max-min angular partitioning model as a mixed-integer linear
//! program in CPLEX LP format, so that an external solver can confirm the
//! optimum found by [`crate::partition::exact_partition`].
//!
//! # Variables
//!
//! Node ids `k` appear as-is; groups `g` run over `1..=G` and positions `p`
//! over `1..=P`.
//!
//! | name       | kind       | meaning                                            |
//! |------------|------------|----------------------------------------------------|
//! | `u_k_g`    | binary     | node `k` is in group `g`                           |
//! | `Y_k_g_p`  | binary     | node `k` is the `p`-th member of group `g`         |
//! | `m_g_p`    | binary     | position `p` is the last occupied one of group `g` |
//! | `t_g_p`    | free       | direction at position `p`                          |
//! | `s_g_p`    | free       | angular shift at position `p`                      |
//! | `T_g`      | free       | direction of the last member                       |
//! | `S_g`      | free       | shift of the last member                           |
//! | `v_g_p`    | free       | linearization of `t_g_p · m_g_p`                   |
//! | `z_g_p`    | free       | linearization of `s_g_p · m_g_p`                   |
//! | `d_g_p`    | `>= 0`     | gap after position `p`; `d_g_P` closes the circle  |
//! | `B`        | `>= 0`     | objective, the smallest gap                        |
//!
//! # Formulations
//!
//! [`Formulation::Repaired`] (the default) is the model whose optimum equals
//! the max-min objective. It differs from [`Formulation::Verbatim`] in four
//! rows, each of which makes partially filled groups infeasible or
//! mis-ordered when taken literally:
//!
//! * `no_gaps`: positions fill front to back, `Σ_k Y_k_g_(p+1) <= Σ_k Y_k_g_p`.
//! * `order`: the `2π` cancellation is keyed on position `q` being empty, not `p`.
//! * `diff`: gains a `2π` cancellation when position `p+1` is empty.
//! * `min_diff`: keyed on position `p+1` being occupied, emitted for `p < P`.
//!
//! Big-M constants are `2π` and `π` throughout.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{NodeId, NodeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formulation {
    #[default]
    Repaired,
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Free,
    NonNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The model as plain data: variables, linear rows, and `maximize B`.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub num_nodes: usize,
    pub num_groups: usize,
    pub num_positions: usize,
    pub formulation: Formulation,
    pub variables: Vec<(String, VarKind)>,
    pub rows: Vec<Row>,
}

pub fn u(k: NodeId, g: usize) -> String {
    format!("u_{k}_{g}")
}

#[allow(non_snake_case)]
pub fn Y(k: NodeId, g: usize, p: usize) -> String {
    format!("Y_{k}_{g}_{p}")
}

fn gp(prefix: &str, g: usize, p: usize) -> String {
    format!("{prefix}_{g}_{p}")
}

struct RowBuilder<'a> {
    rows: &'a mut Vec<Row>,
}

impl RowBuilder<'_> {
    /// Adds a row, dropping zero coefficients. A row left without terms is
    /// skipped when `0 sense rhs` holds and is an error otherwise.
    fn add(&mut self, name: String, terms: Vec<(f64, String)>, sense: Sense, rhs: f64) -> Result<()> {
        let terms: Vec<_> = terms.into_iter().filter(|(c, _)| *c != 0.0).collect();
        if terms.is_empty() {
            let holds = match sense {
                Sense::Le => 0.0 <= rhs,
                Sense::Ge => 0.0 >= rhs,
                Sense::Eq => rhs == 0.0,
            };
            return if holds {
                Ok(())
            } else {
                Err(Error::Domain(format!("row {name} is empty and infeasible")))
            };
        }
        self.rows.push(Row { name, terms, sense, rhs });
        Ok(())
    }
}

/// Builds the model for partitioning `nodes` into `groups` groups of at most
/// `capacity` members.
pub fn build_model(
    nodes: &[NodeProfile],
    groups: usize,
    capacity: usize,
    formulation: Formulation,
) -> Result<MilpModel> {
    crate::partition::check_capacity(nodes.len(), groups, capacity)?;
    let mut ids: Vec<NodeId> = nodes.iter().map(NodeProfile::id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("duplicate node ids".into()));
    }

    let gs = 1..=groups;
    let ps = 1..=capacity;
    let big_p = capacity;
    let repaired = formulation == Formulation::Repaired;

    let mut variables = Vec::new();
    for n in nodes {
        for g in gs.clone() {
            variables.push((u(n.id(), g), VarKind::Binary));
        }
    }
    for n in nodes {
        for g in gs.clone() {
            for p in ps.clone() {
                variables.push((Y(n.id(), g, p), VarKind::Binary));
            }
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            variables.push((gp("m", g, p), VarKind::Binary));
        }
    }
    for prefix in ["t", "s", "v", "z"] {
        for g in gs.clone() {
            for p in ps.clone() {
                variables.push((gp(prefix, g, p), VarKind::Free));
            }
        }
    }
    for g in gs.clone() {
        variables.push((format!("T_{g}"), VarKind::Free));
        variables.push((format!("S_{g}"), VarKind::Free));
    }
    for g in gs.clone() {
        for p in ps.clone() {
            variables.push((gp("d", g, p), VarKind::NonNegative));
        }
    }
    variables.push(("B".to_string(), VarKind::NonNegative));

    let occupancy = |g: usize, p: usize, coef: f64| -> Vec<(f64, String)> {
        nodes.iter().map(|n| (coef, Y(n.id(), g, p))).collect()
    };

    let mut rows = Vec::new();
    let mut b = RowBuilder { rows: &mut rows };

    for n in nodes {
        let terms = gs.clone().map(|g| (1.0, u(n.id(), g))).collect();
        b.add(format!("one_group_{}", n.id()), terms, Sense::Eq, 1.0)?;
    }
    for g in gs.clone() {
        let terms = nodes.iter().map(|n| (1.0, u(n.id(), g))).collect();
        b.add(format!("capacity_{g}"), terms, Sense::Le, capacity as f64)?;
    }
    for n in nodes {
        for g in gs.clone() {
            let mut terms: Vec<_> = ps.clone().map(|p| (1.0, Y(n.id(), g, p))).collect();
            terms.push((-1.0, u(n.id(), g)));
            b.add(format!("link_{}_{g}", n.id()), terms, Sense::Eq, 0.0)?;
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            b.add(format!("one_node_{g}_{p}"), occupancy(g, p, 1.0), Sense::Le, 1.0)?;
        }
    }
    for g in gs.clone() {
        for p in 1..big_p {
            // repaired: later positions never fuller than earlier ones
            let (earlier, later) = if repaired { (-1.0, 1.0) } else { (1.0, -1.0) };
            let mut terms = occupancy(g, p, earlier);
            terms.extend(occupancy(g, p + 1, later));
            b.add(format!("no_gaps_{g}_{p}"), terms, Sense::Le, 0.0)?;
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            let mut terms = vec![(1.0, gp("t", g, p))];
            terms.extend(nodes.iter().map(|n| (-n.theta(), Y(n.id(), g, p))));
            b.add(format!("select_angle_{g}_{p}"), terms, Sense::Eq, 0.0)?;
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            for q in p + 1..=big_p {
                // t_p <= t_q + 2π(1 − Σ Y_·_g_key)
                let key = if repaired { q } else { p };
                let mut terms = vec![(1.0, gp("t", g, p)), (-1.0, gp("t", g, q))];
                terms.extend(occupancy(g, key, TAU));
                b.add(format!("order_{g}_{p}_{q}"), terms, Sense::Le, TAU)?;
            }
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            let mut terms = vec![(1.0, gp("s", g, p))];
            terms.extend(nodes.iter().map(|n| (-PI * n.sigma(), Y(n.id(), g, p))));
            b.add(format!("shift_bound_{g}_{p}"), terms, Sense::Le, 0.0)?;
        }
    }
    for g in gs.clone() {
        for p in ps.clone() {
            let terms = vec![(1.0, format!("T_{g}")), (-1.0, gp("t", g, p))];
            b.add(format!("last_angle_{g}_{p}"), terms, Sense::Ge, 0.0)?;
        }
    }
    for g in gs.clone() {
        let mut terms = vec![(1.0, format!("T_{g}"))];
        terms.extend(ps.clone().map(|p| (-1.0, gp("v", g, p))));
        b.add(format!("last_angle_select_{g}"), terms, Sense::Le, 0.0)?;

        let mut terms = vec![(1.0, format!("S_{g}"))];
        terms.extend(ps.clone().map(|p| (-1.0, gp("z", g, p))));
        b.add(format!("last_shift_{g}"), terms, Sense::Eq, 0.0)?;

        let terms = ps.clone().map(|p| (1.0, gp("m", g, p))).collect();
        b.add(format!("select_one_{g}"), terms, Sense::Eq, 1.0)?;
    }
    for g in gs.clone() {
        for p in ps.clone() {
            let (v, z, t, s, m) = (gp("v", g, p), gp("z", g, p), gp("t", g, p), gp("s", g, p), gp("m", g, p));
            b.add(format!("aux_v_t_{g}_{p}"), vec![(1.0, v.clone()), (-1.0, t.clone())], Sense::Le, 0.0)?;
            b.add(format!("aux_v_m_{g}_{p}"), vec![(1.0, v.clone()), (-TAU, m.clone())], Sense::Le, 0.0)?;
            b.add(
                format!("aux_v_tm_{g}_{p}"),
                vec![(1.0, v), (-1.0, t), (-TAU, m.clone())],
                Sense::Ge,
                -TAU,
            )?;
            b.add(format!("aux_z_s_{g}_{p}"), vec![(1.0, z.clone()), (-1.0, s.clone())], Sense::Le, 0.0)?;
            b.add(format!("aux_z_m_{g}_{p}"), vec![(1.0, z.clone()), (-PI, m.clone())], Sense::Le, 0.0)?;
            b.add(
                format!("aux_z_sm_{g}_{p}"),
                vec![(1.0, z), (-1.0, s), (-PI, m)],
                Sense::Ge,
                -PI,
            )?;
        }
    }
    for g in gs.clone() {
        for p in 1..big_p {
            // d_p <= t_(p+1) − t_p + s_(p+1) + s_p [+ 2π(1 − Σ Y_·_g_(p+1))]
            let mut terms = vec![
                (1.0, gp("d", g, p)),
                (-1.0, gp("t", g, p + 1)),
                (1.0, gp("t", g, p)),
                (-1.0, gp("s", g, p + 1)),
                (-1.0, gp("s", g, p)),
            ];
            let rhs = if repaired {
                terms.extend(occupancy(g, p + 1, TAU));
                TAU
            } else {
                0.0
            };
            b.add(format!("diff_{g}_{p}"), terms, Sense::Le, rhs)?;
        }
        let terms = vec![
            (1.0, gp("d", g, big_p)),
            (-1.0, gp("t", g, 1)),
            (1.0, format!("T_{g}")),
            (-1.0, gp("s", g, 1)),
            (-1.0, format!("S_{g}")),
        ];
        b.add(format!("wrap_diff_{g}"), terms, Sense::Le, TAU)?;
    }
    for g in gs.clone() {
        for p in ps.clone() {
            b.add(format!("diff_cap_{g}_{p}"), vec![(1.0, gp("d", g, p))], Sense::Le, PI)?;
        }
    }
    for g in gs.clone() {
        // B <= d_p + π(1 − Σ Y_·_g_key)
        let positions = if repaired { 1..big_p } else { 1..big_p + 1 };
        for p in positions {
            let key = if repaired { p + 1 } else { p };
            let mut terms = vec![(1.0, "B".to_string()), (-1.0, gp("d", g, p))];
            terms.extend(occupancy(g, key, PI));
            b.add(format!("min_diff_{g}_{p}"), terms, Sense::Le, PI)?;
        }
        let terms = vec![(1.0, "B".to_string()), (-1.0, gp("d", g, big_p))];
        b.add(format!("min_wrap_{g}"), terms, Sense::Le, 0.0)?;
    }

    Ok(MilpModel {
        num_nodes: nodes.len(),
        num_groups: groups,
        num_positions: capacity,
        formulation,
        variables,
        rows,
    })
}

/// Shortest decimal that reads back to the same `f64`.
fn number(x: f64) -> String {
    format!("{x:?}")
}

impl MilpModel {
    pub fn count(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|(_, k)| *k == kind).count()
    }

    pub fn write_lp<W: Write>(&self, mut out: W) -> io::Result<()> {
        let label = match self.formulation {
            Formulation::Repaired => "repaired",
            Formulation::Verbatim => "verbatim",
        };
        writeln!(out, "\\ max-min angular node partitioning")?;
        writeln!(
            out,
            "\\ nodes: {}  groups: {}  positions: {}  formulation: {label}",
            self.num_nodes, self.num_groups, self.num_positions
        )?;
        writeln!(out, "Maximize")?;
        writeln!(out, " obj: B")?;
        writeln!(out, "Subject To")?;
        for row in &self.rows {
            let mut line = format!(" {}:", row.name);
            for (i, (coef, var)) in row.terms.iter().enumerate() {
                let sign = if *coef < 0.0 { "-" } else if i == 0 { "" } else { "+" };
                let mag = coef.abs();
                let mut term = String::new();
                if !sign.is_empty() {
                    let _ = write!(term, " {sign}");
                }
                if mag == 1.0 {
                    let _ = write!(term, " {var}");
                } else {
                    let _ = write!(term, " {} {var}", number(mag));
                }
                if line.len() + term.len() > 100 {
                    writeln!(out, "{line}")?;
                    line = "  ".to_string();
                }
                line.push_str(&term);
            }
            writeln!(out, "{line} {} {}", row.sense.as_str(), number(row.rhs))?;
        }
        writeln!(out, "Bounds")?;
        for (name, kind) in &self.variables {
            if *kind == VarKind::Free {
                writeln!(out, " {name} free")?;
            }
        }
        writeln!(out, "Binary")?;
        for (name, kind) in &self.variables {
            if *kind == VarKind::Binary {
                writeln!(out, " {name}")?;
            }
        }
        writeln!(out, "End")?;
        Ok(())
    }

    pub fn to_lp_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_lp(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("LP text is ASCII")
    }
}

/// Builds the model and writes it to `path`.
pub fn export_lp(
    nodes: &[NodeProfile],
    groups: usize,
    capacity: usize,
    path: &Path,
    formulation: Formulation,
) -> Result<MilpModel> {
    let model = build_model(nodes, groups, capacity, formulation)?;
    let file = fs::File::create(path)?;
    let mut out = io::BufWriter::new(file);
    model.write_lp(&mut out)?;
    out.flush()?;
    Ok(model)
}
