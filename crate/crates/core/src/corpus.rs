//! JSON file formats and the built-in test corpus.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cones::{homogenize, ConeFile, RationalCone};
use crate::error::{Error, Result};
use crate::polytope::RationalPolytope;
use crate::ratpoly::{rat, ratio, serde_rat, Rat};
use crate::semimagic::birkhoff_polytope;

/// Polytope JSON: vertices as rational strings (`"p/q"`) or integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub name: String,
    pub ambient_dim: usize,
    #[serde(with = "serde_rat::matrix")]
    pub vertices: Vec<Vec<Rat>>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &RationalPolytope) -> Self {
        PolytopeFile {
            name: p.name().to_string(),
            ambient_dim: p.ambient_dim(),
            vertices: p.vertices().to_vec(),
        }
    }

    pub fn into_polytope(self) -> Result<RationalPolytope> {
        if let Some(v) = self.vertices.iter().find(|v| v.len() != self.ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        RationalPolytope::normalize(self.name, self.vertices)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "{what}: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

pub fn parse_polytope(text: &str) -> Result<RationalPolytope> {
    parse_json::<PolytopeFile>(text, "polytope")?.into_polytope()
}

pub fn parse_cone(text: &str) -> Result<RationalCone> {
    RationalCone::from_file(&parse_json::<ConeFile>(text, "cone")?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_polytope(path: &Path) -> Result<RationalPolytope> {
    parse_polytope(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_cone(path: &Path) -> Result<RationalCone> {
    parse_cone(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// One row per vector, compact inside rows.
fn rows_json<T: Serialize>(rows: &[T]) -> String {
    let lines: Vec<String> = rows
        .iter()
        .map(|r| format!("    {}", serde_json::to_string(r).expect("serializable")))
        .collect();
    format!("[\n{}\n  ]", lines.join(",\n"))
}

pub fn polytope_json(p: &RationalPolytope) -> String {
    let vertices: Vec<Vec<String>> = p
        .vertices()
        .iter()
        .map(|v| v.iter().map(|x| x.to_string()).collect())
        .collect();
    format!(
        "{{\n  \"name\": {},\n  \"ambient_dim\": {},\n  \"vertices\": {}\n}}",
        serde_json::to_string(p.name()).expect("serializable"),
        p.ambient_dim(),
        rows_json(&vertices)
    )
}

pub fn cone_json(k: &RationalCone) -> String {
    format!(
        "{{\n  \"ambient_dim\": {},\n  \"generators\": {}\n}}",
        k.ambient_dim(),
        rows_json(k.generators())
    )
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}

/// A named cone; the name is the file stem for cones read from disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedCone {
    pub name: String,
    pub cone: RationalCone,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub polytopes: Vec<RationalPolytope>,
    pub cones: Vec<NamedCone>,
}

/// Reads `dir/polytopes/*.json` and `dir/cones/*.json` in file-name order.
pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let pdir = dir.join("polytopes");
    if pdir.is_dir() {
        for f in json_files(&pdir)? {
            corpus.polytopes.push(read_polytope(&f)?);
        }
    }
    let cdir = dir.join("cones");
    if cdir.is_dir() {
        for f in json_files(&cdir)? {
            let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            corpus.cones.push(NamedCone {
                name,
                cone: read_cone(&f)?,
            });
        }
    }
    Ok(corpus)
}

/// Writes the built-in corpus in the layout [`load_corpus`] reads.
pub fn write_corpus(dir: &Path, corpus: &Corpus) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir.join("polytopes")).map_err(io)?;
    fs::create_dir_all(dir.join("cones")).map_err(io)?;
    for p in &corpus.polytopes {
        fs::write(dir.join("polytopes").join(format!("{}.json", p.name())), polytope_json(p) + "\n").map_err(io)?;
    }
    for c in &corpus.cones {
        fs::write(dir.join("cones").join(format!("{}.json", c.name)), cone_json(&c.cone) + "\n").map_err(io)?;
    }
    Ok(())
}

fn lattice(name: &str, pts: &[&[i64]]) -> RationalPolytope {
    RationalPolytope::from_integer_points(name, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>())
        .expect("built-in polytope")
}

fn rational(name: &str, pts: Vec<Vec<Rat>>) -> RationalPolytope {
    RationalPolytope::normalize(name, pts).expect("built-in polytope")
}

/// `conv{0, e1, e2, (1, 1, q)}`: no lattice points besides its vertices.
pub fn reeve(q: i64) -> RationalPolytope {
    lattice(&format!("reeve-{q}"), &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, q]])
}

pub fn unit_cube(d: usize) -> RationalPolytope {
    let pts: Vec<Vec<i64>> = (0..1u32 << d)
        .map(|m| (0..d).map(|i| i64::from(m >> i & 1)).collect())
        .collect();
    RationalPolytope::from_integer_points(format!("cube-{d}"), &pts).expect("cube")
}

pub fn standard_simplex(d: usize) -> RationalPolytope {
    let mut pts = vec![vec![0i64; d]];
    for i in 0..d {
        let mut e = vec![0; d];
        e[i] = 1;
        pts.push(e);
    }
    RationalPolytope::from_integer_points(format!("simplex-{d}"), &pts).expect("simplex")
}

pub fn builtin_polytopes() -> Vec<RationalPolytope> {
    vec![
        lattice("segment-1", &[&[0], &[1]]),
        lattice("segment-2", &[&[0], &[2]]),
        rational("half-segment", vec![vec![rat(0)], vec![ratio(1, 2)]]),
        rational(
            "half-triangle",
            vec![vec![rat(0), rat(0)], vec![ratio(1, 2), rat(0)], vec![rat(0), ratio(1, 2)]],
        ),
        lattice("unimodular-triangle", &[&[0, 0], &[1, 0], &[0, 1]]),
        unit_cube(2).with_name("unit-square"),
        lattice("square-centered", &[&[-1, -1], &[1, -1], &[-1, 1], &[1, 1]]),
        lattice("cross-2", &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]),
        lattice("triangle-3-1", &[&[0, 0], &[3, 0], &[0, 1]]),
        lattice("rectangle-1-2", &[&[0, 0], &[1, 0], &[0, 2], &[1, 2]]),
        lattice("edge-in-plane", &[&[0, 0], &[1, 0]]),
        unit_cube(3).with_name("unit-cube"),
        standard_simplex(3),
        lattice(
            "octahedron",
            &[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]],
        ),
        reeve(2),
        reeve(3),
        standard_simplex(4),
        unit_cube(4),
        birkhoff_polytope(3).expect("birkhoff"),
    ]
}

pub fn builtin_cones() -> Vec<NamedCone> {
    let named = |name: &str, gens: &[&[i64]]| NamedCone {
        name: name.to_string(),
        cone: RationalCone::new(gens[0].len(), gens.iter().map(|g| g.to_vec()).collect()).expect("built-in cone"),
    };
    let mut cones = vec![
        named("axis-1", &[&[1]]),
        named("axis-2", &[&[1, 0], &[0, 1]]),
        named("axis-3", &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        named("wedge-2", &[&[1, 0], &[1, 3]]),
        named("cross-cone-3", &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]),
        named("flat-wedge-3", &[&[1, 0, 0], &[1, 2, 0]]),
    ];
    cones.push(NamedCone {
        name: "cone-unit-square".into(),
        cone: homogenize(&unit_cube(2)),
    });
    cones.push(NamedCone {
        name: "cone-simplex-3".into(),
        cone: homogenize(&standard_simplex(3)),
    });
    cones
}

pub fn builtin_corpus() -> Corpus {
    Corpus {
        polytopes: builtin_polytopes(),
        cones: builtin_cones(),
    }
}

/// Convex hull of random integer points, retried until full-dimensional.
pub fn random_lattice_polytope<R: Rng>(rng: &mut R, dim: usize, max_coord: i64, name: &str) -> RationalPolytope {
    loop {
        let npoints = rng.gen_range(dim + 1..=dim + 4);
        let pts: Vec<Vec<i64>> = (0..npoints)
            .map(|_| (0..dim).map(|_| rng.gen_range(0..=max_coord)).collect())
            .collect();
        if let Ok(p) = RationalPolytope::from_integer_points(name, &pts) {
            if p.dim() == dim {
                return p;
            }
        }
    }
}

/// `count` random lattice polytopes of dimensions cycling through 1..=3.
pub fn random_polytopes(count: usize, seed: u64) -> Vec<RationalPolytope> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_lattice_polytope(&mut rng, i % 3 + 1, 3, &format!("random-{seed}-{i}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        for p in builtin_polytopes() {
            assert_eq!(parse_polytope(&polytope_json(&p)).unwrap(), p);
        }
        for c in builtin_cones() {
            assert_eq!(parse_cone(&cone_json(&c.cone)).unwrap(), c.cone);
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_polytope("{\n \"name\": \"x\",\n \"ambient_dim\": 1\n \"vertices\": [[0]]\n}").unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("line 4")), "{err:?}");
        let err = parse_polytope("{\"name\": \"x\", \"ambient_dim\": 1, \"vertices\": [[\"1/0\"]]}").unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("zero denominator")), "{err:?}");
        let err = parse_polytope("{\"name\": \"x\", \"ambient_dim\": 2, \"vertices\": [[1]]}").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let p = parse_polytope("{\"name\": \"x\", \"ambient_dim\": 1, \"vertices\": [[0], [\"3/2\"]]}").unwrap();
        assert_eq!(p.vertices()[1], vec![ratio(3, 2)]);
    }

    #[test]
    fn corpus_shape() {
        let ps = builtin_polytopes();
        assert!(ps.len() >= 12);
        for d in 1..=4 {
            assert!(ps.iter().any(|p| p.dim() == d));
        }
        assert!(ps.iter().any(|p| !p.is_lattice()));
        let mut names: Vec<&str> = ps.iter().map(|p| p.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), ps.len());
        assert!(builtin_cones().len() >= 6);
    }
}
