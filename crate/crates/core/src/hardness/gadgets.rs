//! Reduction gadgets as standalone fragments with named ports.
//!
//! Local vertex ids of a fragment are `0..n`; `labels[v]` names the role of
//! `v`. Subdivision vertices of the cover gadget are labelled `a~b.1` and
//! `a~b.2` after the raw edge `{a, b}` they subdivide, numbered from `a`.

use std::collections::HashMap;

use crate::error::Result;
use crate::instance::{Arc, ArcId, Capacity, Instance, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortDir {
    /// Receives external arcs only.
    In,
    /// Sends external arcs only.
    Out,
    Io,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetFragment {
    pub labels: Vec<String>,
    pub arcs: Vec<Arc>,
    pub terminals: Vec<Vertex>,
    pub ports: Vec<(&'static str, Vertex, PortDir)>,
    /// Named directed paths, as full vertex sequences.
    pub paths: Vec<(&'static str, Vec<Vertex>)>,
}

impl GadgetFragment {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn port(&self, name: &str) -> Option<Vertex> {
        self.ports.iter().find(|p| p.0 == name).map(|p| p.1)
    }

    pub fn path(&self, name: &str) -> Option<&[Vertex]> {
        self.paths.iter().find(|p| p.0 == name).map(|p| p.1.as_slice())
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.terminals.contains(&v)
    }

    pub fn find_arc(&self, tail: Vertex, head: Vertex) -> Option<usize> {
        self.arcs.iter().position(|a| a.tail == tail && a.head == head)
    }

    /// The fragment on its own, with terminals and io ports as waypoints.
    pub fn to_instance(&self) -> Result<Instance> {
        let mut ws = self.terminals.clone();
        ws.extend(self.ports.iter().filter(|p| p.2 == PortDir::Io).map(|p| p.1));
        Instance::relaxed(self.n(), self.arcs.clone(), ws, None, false)
    }
}

/// `u_in → v_i → w` for every terminal `v_i`, then `w → u_out` with
/// capacity `p`. Any walk through all `v_i` leaves via `u_out` exactly `p`
/// times.
pub fn gen_force_gadget(p: usize) -> GadgetFragment {
    assert!(p >= 1, "force gadget needs p >= 1");
    let mut labels: Vec<String> = vec!["u_in".into(), "u_out".into(), "w".into()];
    labels.extend((1..=p).map(|i| format!("v{i}")));
    let unb = Capacity::Unbounded;
    let mut arcs = Vec::with_capacity(2 * p + 1);
    for i in 0..p {
        arcs.push(Arc::new(0, 3 + i, 1, unb));
        arcs.push(Arc::new(3 + i, 2, 1, unb));
    }
    arcs.push(Arc::new(2, 1, 1, Capacity::Finite(p as u64)));
    GadgetFragment {
        labels,
        arcs,
        terminals: (3..3 + p).collect(),
        ports: vec![("u_in", 0, PortDir::In), ("u_out", 1, PortDir::Out)],
        paths: Vec::new(),
    }
}

/// A force gadget hung off the two-cycle `h0 ⇄ h1` through `h0 → u_in` and
/// `u_out → h0`. Waypoints are `h0`, `h1` and the gadget terminals. Returns
/// the instance and the id of the `w → u_out` arc. Host vertices come after
/// the gadget's local ids.
pub fn force_gadget_host(p: usize) -> (Instance, ArcId) {
    let g = gen_force_gadget(p);
    let (h0, h1) = (g.n(), g.n() + 1);
    let mut arcs = g.arcs.clone();
    let unb = Capacity::Unbounded;
    arcs.push(Arc::new(h0, h1, 1, unb));
    arcs.push(Arc::new(h1, h0, 1, unb));
    arcs.push(Arc::new(h0, g.port("u_in").unwrap(), 1, unb));
    arcs.push(Arc::new(g.port("u_out").unwrap(), h0, 1, unb));
    let mut ws = vec![h0, h1];
    ws.extend(&g.terminals);
    let inst = Instance::new(g.n() + 2, arcs, ws, None, false).expect("host is well formed");
    let exit = inst.find_arc(2, 1).expect("w -> u_out present");
    (inst, exit)
}

const RAW: [&str; 22] = [
    "s_in", "e", "f", "b", "a", "x_in", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9", "y_out",
    "d", "c", "h", "g", "t_out", "z_io",
];

// Raw edges; `true` marks the ones turned into arcs in the listed direction.
const RAW_EDGES: [(&str, &str, bool); 26] = [
    ("s_in", "e", true),
    ("e", "f", true),
    ("f", "b", true),
    ("b", "a", false),
    ("a", "x_in", false),
    ("x_in", "w1", true),
    ("w1", "w2", false),
    ("w2", "w3", false),
    ("w3", "w4", true),
    ("w4", "w5", false),
    ("w5", "w6", false),
    ("w6", "w7", true),
    ("w7", "w8", false),
    ("w8", "w9", false),
    ("w9", "y_out", true),
    ("y_out", "d", false),
    ("d", "c", false),
    ("c", "h", true),
    ("h", "g", true),
    ("g", "t_out", true),
    ("f", "w3", false),
    ("w1", "w6", true),
    ("w4", "w9", true),
    ("w7", "h", false),
    ("b", "z_io", true),
    ("z_io", "c", true),
];

const R1: [&str; 21] = [
    "s_in", "e", "f", "b", "a", "x_in", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9", "y_out",
    "d", "c", "h", "g", "t_out",
];
const R2: [&str; 15] =
    ["s_in", "e", "f", "w3", "w2", "w1", "w6", "w5", "w4", "w9", "w8", "w7", "h", "g", "t_out"];
const P: [&str; 7] = ["x_in", "a", "b", "z_io", "c", "d", "y_out"];

/// The cover gadget around its shared vertex `z_io`: the raw gadget with
/// the listed edges oriented, every edge and arc subdivided by two
/// non-terminals, and the remaining edges doubled into opposite arcs.
/// Terminals are the 21 raw vertices other than `z_io`. Local ids: the raw
/// vertices in path order (`z_io` is 21), then subdivision pairs in edge
/// order.
pub fn gen_cover_gadget() -> GadgetFragment {
    let id = |name: &str| RAW.iter().position(|&r| r == name).unwrap();
    let mut labels: Vec<String> = RAW.iter().map(|s| s.to_string()).collect();
    let unb = Capacity::Unbounded;
    let mut arcs = Vec::new();
    // (u, v) -> the two subdivision vertices met going from u to v
    let mut mids: HashMap<(Vertex, Vertex), [Vertex; 2]> = HashMap::new();
    for &(a, b, oriented) in &RAW_EDGES {
        let (u, v) = (id(a), id(b));
        let (p1, p2) = (labels.len(), labels.len() + 1);
        labels.push(format!("{a}~{b}.1"));
        labels.push(format!("{a}~{b}.2"));
        for (t, h) in [(u, p1), (p1, p2), (p2, v)] {
            arcs.push(Arc::new(t, h, 1, unb));
            if !oriented {
                arcs.push(Arc::new(h, t, 1, unb));
            }
        }
        mids.insert((u, v), [p1, p2]);
        if !oriented {
            mids.insert((v, u), [p2, p1]);
        }
    }
    let expand = |names: &[&str]| -> Vec<Vertex> {
        let mut out = vec![id(names[0])];
        for pair in names.windows(2) {
            let (u, v) = (id(pair[0]), id(pair[1]));
            out.extend(mids[&(u, v)]);
            out.push(v);
        }
        out
    };
    let paths = vec![("R1", expand(&R1)), ("R2", expand(&R2)), ("P", expand(&P))];
    GadgetFragment {
        labels,
        arcs,
        terminals: (0..21).collect(),
        ports: vec![
            ("s_in", id("s_in"), PortDir::In),
            ("x_in", id("x_in"), PortDir::In),
            ("t_out", id("t_out"), PortDir::Out),
            ("y_out", id("y_out"), PortDir::Out),
            ("z_io", id("z_io"), PortDir::Io),
        ],
        paths,
    }
}
