//! Compiles a framework into `A pi = B` over the possible worlds.

use std::fmt;
use std::io::Write;

use crate::error::Result;
use crate::linalg::Matrix;
use crate::model::{check_cap, ConjMask, Literal, PDFramework};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowTag {
    /// Row encoding the p-rule with this index.
    Rule(usize),
    /// Closed-world row for this head literal.
    Pcwa(Literal),
    Normalization,
    /// Stationarity row for world `j` in an augmented Lagrange system.
    Lagrange(usize),
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowTag::Rule(i) => write!(f, "rule:{i}"),
            RowTag::Pcwa(l) => write!(f, "pcwa:{}{}", if l.positive { "" } else { "~" }, l.atom),
            RowTag::Normalization => f.write_str("normalization"),
            RowTag::Lagrange(j) => write!(f, "lagrange:{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub row_tags: Vec<RowTag>,
    pub n_atoms: usize,
    /// Leading columns that are world probabilities; any further columns are
    /// Lagrange multipliers.
    pub n_worlds: usize,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn rows(&self) -> usize {
        self.a.rows
    }

    pub fn cols(&self) -> usize {
        self.a.cols
    }

    pub fn is_augmented(&self) -> bool {
        self.a.cols > self.n_worlds
    }

    pub fn has_pcwa_rows(&self) -> bool {
        self.row_tags.iter().any(|t| matches!(t, RowTag::Pcwa(_)))
    }

    pub fn push_row(&mut self, row: Vec<T>, b: T, tag: RowTag) {
        self.a.push_row(row);
        self.b.push(b);
        self.row_tags.push(tag);
    }

    /// Max-norm residual of `A x - B`.
    pub fn residual(&self, x: &[T]) -> f64 {
        crate::linalg::residual_max(&self.a, x, &self.b)
    }

    pub fn select_rows(&self, keep: &[usize]) -> Self {
        LinearSystem {
            a: self.a.select_rows(keep),
            b: keep.iter().map(|&i| self.b[i].clone()).collect(),
            row_tags: keep.iter().map(|&i| self.row_tags[i]).collect(),
            n_atoms: self.n_atoms,
            n_worlds: self.n_worlds,
        }
    }

    pub fn to_f64(&self) -> LinearSystem<f64> {
        LinearSystem {
            a: Matrix {
                rows: self.a.rows,
                cols: self.a.cols,
                data: self.a.data.iter().map(Scalar::to_f64).collect(),
            },
            b: self.b.iter().map(Scalar::to_f64).collect(),
            row_tags: self.row_tags.clone(),
            n_atoms: self.n_atoms,
            n_worlds: self.n_worlds,
        }
    }

    /// Writes `tag,b,c0,c1,...` rows, one per constraint.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["tag".to_string(), "b".to_string()];
        header.extend((0..self.cols()).map(|j| {
            if j < self.n_worlds {
                format!("w{j}")
            } else {
                format!("l{}", j - self.n_worlds)
            }
        }));
        w.write_record(&header)?;
        for i in 0..self.rows() {
            let mut rec = vec![self.row_tags[i].to_string(), self.b[i].to_f64().to_string()];
            rec.extend(self.a.row(i).iter().map(|v| v.to_f64().to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One row per rule plus the normalisation row. An empty-body rule puts 1 on
/// the worlds of its head with rhs `theta`; a conditional rule puts
/// `theta - 1` on `head ∧ body` worlds and `theta` on `¬head ∧ body` worlds,
/// rhs 0.
pub fn build_owa<T: Scalar>(framework: &PDFramework) -> Result<LinearSystem<T>> {
    framework.validate()?;
    let n = framework.n_atoms();
    check_cap(n)?;
    let worlds = 1usize << n;
    let mut system = LinearSystem {
        a: Matrix::zeros(0, worlds),
        b: Vec::with_capacity(framework.rules.len() + 1),
        row_tags: Vec::with_capacity(framework.rules.len() + 1),
        n_atoms: n,
        n_worlds: worlds,
    };
    for (r, rule) in framework.rules.iter().enumerate() {
        let theta = T::from_f64(rule.theta);
        let mut row = vec![T::zero(); worlds];
        let head = ConjMask::new(n, &[rule.head]).expect("single literal");
        if rule.body.is_empty() {
            for (j, v) in row.iter_mut().enumerate() {
                if head.matches(j) {
                    *v = T::one();
                }
            }
            system.push_row(row, theta, RowTag::Rule(r));
        } else {
            let body = ConjMask::new(n, &rule.body).expect("rule bodies are consistent");
            let on = theta.clone() - T::one();
            for (j, v) in row.iter_mut().enumerate() {
                if body.matches(j) {
                    *v = if head.matches(j) { on.clone() } else { theta.clone() };
                }
            }
            system.push_row(row, T::zero(), RowTag::Rule(r));
        }
    }
    system.push_row(vec![T::one(); worlds], T::one(), RowTag::Normalization);
    Ok(system)
}

/// All rule bodies sharing one head literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadGroup {
    pub head: Literal,
    pub bodies: Vec<Vec<Literal>>,
}

/// Groups rules by head literal (sign-sensitive), groups in order of first
/// appearance and bodies in rule order.
pub fn group_heads(framework: &PDFramework) -> Vec<HeadGroup> {
    let mut groups: Vec<HeadGroup> = Vec::new();
    for rule in &framework.rules {
        match groups.iter_mut().find(|g| g.head == rule.head) {
            Some(g) => g.bodies.push(rule.body.clone()),
            None => groups.push(HeadGroup { head: rule.head, bodies: vec![rule.body.clone()] }),
        }
    }
    groups
}

/// Appends one closed-world row per head group: 1 on every world where the
/// head holds but no body of that head does, rhs 0.
pub fn append_pcwa_rows<T: Scalar>(mut system: LinearSystem<T>, groups: &[HeadGroup]) -> LinearSystem<T> {
    let n = system.n_atoms;
    let cols = system.cols();
    for g in groups {
        let head = ConjMask::new(n, &[g.head]).expect("single literal");
        let bodies: Vec<ConjMask> = g.bodies.iter().filter_map(|b| ConjMask::new(n, b)).collect();
        let mut row = vec![T::zero(); cols];
        for (j, v) in row.iter_mut().enumerate().take(system.n_worlds) {
            if head.matches(j) && !bodies.iter().any(|b| b.matches(j)) {
                *v = T::one();
            }
        }
        system.push_row(row, T::zero(), RowTag::Pcwa(g.head));
    }
    system
}

/// [`build_owa`] followed by the closed-world rows.
pub fn build_pcwa<T: Scalar>(framework: &PDFramework) -> Result<LinearSystem<T>> {
    let system = build_owa(framework)?;
    Ok(append_pcwa_rows(system, &group_heads(framework)))
}

/// Stationarity system for maximum linear entropy:
/// `[[A, 0], [I, -A^T]] [pi; lambda] = [B; 0]`.
pub fn build_lagrange_augmented<T: Scalar>(system: &LinearSystem<T>) -> LinearSystem<T> {
    let m = system.rows();
    let w = system.n_worlds;
    let size = m + w;
    let mut a = Matrix::zeros(size, size);
    for i in 0..m {
        for j in 0..w {
            a[(i, j)] = system.a[(i, j)].clone();
        }
    }
    for j in 0..w {
        a[(m + j, j)] = T::one();
        for i in 0..m {
            if !system.a[(i, j)].is_zero() {
                a[(m + j, w + i)] = -system.a[(i, j)].clone();
            }
        }
    }
    let mut b = system.b.clone();
    b.extend(std::iter::repeat_n(T::zero(), w));
    let mut row_tags = system.row_tags.clone();
    row_tags.extend((0..w).map(RowTag::Lagrange));
    LinearSystem { a, b, row_tags, n_atoms: system.n_atoms, n_worlds: w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_pd;

    #[test]
    fn single_fact() {
        let fw = parse_pd("s0 <- : 1.").unwrap();
        let sys: LinearSystem<f64> = build_owa(&fw).unwrap();
        assert_eq!(sys.a.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(sys.b, vec![1.0, 1.0]);
    }

    #[test]
    fn pcwa_tags_and_zero_rows() {
        let fw = parse_pd("s0 <- : 0.7. s1 <- s0 : 0.5.").unwrap();
        let sys: LinearSystem<f64> = build_pcwa(&fw).unwrap();
        assert_eq!(sys.rows(), 5);
        assert_eq!(sys.row_tags[3], RowTag::Pcwa(Literal::pos(0)));
        assert!(sys.a.row(3).iter().all(|&v| v == 0.0));
        // s1 without s0: worlds 01.
        assert_eq!(sys.a.row(4), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn augmented_shapes() {
        let fw = parse_pd("s0 <- s1 : 0.9. s1 <- : 0.8.").unwrap();
        let sys: LinearSystem<f64> = build_owa(&fw).unwrap();
        let aug = build_lagrange_augmented(&sys);
        assert_eq!((aug.rows(), aug.cols()), (7, 7));
        for i in 0..3 {
            for j in 4..7 {
                assert_eq!(aug.a[(i, j)], 0.0);
            }
        }
        assert_eq!(aug.row_tags[3], RowTag::Lagrange(0));
    }

    #[test]
    fn csv_dump() {
        let fw = parse_pd("s0 <- : 0.5.").unwrap();
        let sys: LinearSystem<f64> = build_owa(&fw).unwrap();
        let mut buf = Vec::new();
        sys.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "tag,b,w0,w1\nrule:0,0.5,0,1\nnormalization,1,1,1\n");
    }
}
