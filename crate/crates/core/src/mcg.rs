//! Action of Dehn twists on the first homology of a closed genus-g surface
//! with the standard symplectic basis a_1, b_1, ..., a_g, b_g. A twist along
//! a curve with class c acts as the transvection x -> x ± <x,c> c; the sign
//! is the handedness. Words compose with the rightmost letter applied first.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum McgError {
    #[error("homology class must have even, positive length (got {0})")]
    BadLength(usize),
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(u32, u32),
    #[error("empty twist word")]
    EmptyWord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn flipped(self) -> Handedness {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }
}

/// Element of H_1(Sigma_g; Z) in coordinates (a_1, b_1, ..., a_g, b_g).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    coords: Vec<i64>,
}

impl HomologyClass {
    pub fn new(coords: Vec<i64>) -> Result<Self, McgError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(McgError::BadLength(coords.len()));
        }
        Ok(HomologyClass { coords })
    }

    pub fn genus(&self) -> u32 {
        (self.coords.len() / 2) as u32
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> =
            self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", strs.join(","))
    }
}

/// Standard algebraic intersection pairing: sum over handles of
/// x_{a_i} y_{b_i} - x_{b_i} y_{a_i}.
pub fn intersection_pairing(
    x: &HomologyClass,
    y: &HomologyClass,
) -> Result<i64, McgError> {
    if x.genus() != y.genus() {
        return Err(McgError::GenusMismatch(x.genus(), y.genus()));
    }
    let mut acc = 0i64;
    for i in 0..x.genus() as usize {
        acc += x.coords[2 * i] * y.coords[2 * i + 1]
            - x.coords[2 * i + 1] * y.coords[2 * i];
    }
    Ok(acc)
}

/// Dense square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMatrix {
    n: usize,
    a: Vec<i64>,
}

impl SquareMatrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        SquareMatrix { n, a }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            a.extend_from_slice(r);
        }
        SquareMatrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SquareMatrix { n, a: vec![0; n * n] };
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> SquareMatrix {
        let n = self.n;
        let mut out = SquareMatrix { n, a: vec![0; n * n] };
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// Matrix J of the intersection form in the standard basis.
pub fn symplectic_form(genus: u32) -> SquareMatrix {
    let n = 2 * genus as usize;
    let mut j = SquareMatrix { n, a: vec![0; n * n] };
    for i in 0..genus as usize {
        j.set(2 * i, 2 * i + 1, 1);
        j.set(2 * i + 1, 2 * i, -1);
    }
    j
}

/// Transvection matrix of the twist along c: column j is
/// e_j + sign * <e_j, c> c, sign +1 for right-handed twists.
pub fn twist_matrix(c: &HomologyClass, h: Handedness) -> SquareMatrix {
    let n = c.coords.len();
    let sign = match h {
        Handedness::Right => 1,
        Handedness::Left => -1,
    };
    let mut m = SquareMatrix::identity(n);
    for j in 0..n {
        // <e_j, c>
        let mut e = vec![0i64; n];
        e[j] = 1;
        let ej = HomologyClass { coords: e };
        let pair = intersection_pairing(&ej, c).unwrap();
        for i in 0..n {
            let v = m.get(i, j) + sign * pair * c.coords[i];
            m.set(i, j, v);
        }
    }
    m
}

/// Word of Dehn twists, letters written leftmost-first; the rightmost
/// letter acts first on homology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistWord {
    genus: u32,
    letters: Vec<(HomologyClass, Handedness)>,
}

impl TwistWord {
    pub fn new(
        letters: Vec<(HomologyClass, Handedness)>,
    ) -> Result<Self, McgError> {
        let genus = match letters.first() {
            Some((c, _)) => c.genus(),
            None => return Err(McgError::EmptyWord),
        };
        for (c, _) in &letters {
            if c.genus() != genus {
                return Err(McgError::GenusMismatch(genus, c.genus()));
            }
        }
        Ok(TwistWord { genus, letters })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn letters(&self) -> &[(HomologyClass, Handedness)] {
        &self.letters
    }

    pub fn flipped(&self) -> TwistWord {
        TwistWord {
            genus: self.genus,
            letters: self
                .letters
                .iter()
                .map(|(c, h)| (c.clone(), h.flipped()))
                .collect(),
        }
    }

    /// Inverse word: letters reversed, handedness flipped.
    pub fn inverse(&self) -> TwistWord {
        TwistWord {
            genus: self.genus,
            letters: self
                .letters
                .iter()
                .rev()
                .map(|(c, h)| (c.clone(), h.flipped()))
                .collect(),
        }
    }
}

/// Product of the letters' matrices in written order, so the rightmost
/// factor acts first on column vectors.
pub fn compose_word(w: &TwistWord) -> SquareMatrix {
    let mut m = SquareMatrix::identity(2 * w.genus as usize);
    for (c, h) in &w.letters {
        m = m.mul(&twist_matrix(c, *h));
    }
    m
}

/// Does the word fix z up to sign? (Requirement for the round 2-handle
/// monodromy: M z = ±z.)
pub fn round_handle_check(
    w: &TwistWord,
    z: &HomologyClass,
) -> Result<bool, McgError> {
    if z.genus() != w.genus {
        return Err(McgError::GenusMismatch(w.genus, z.genus()));
    }
    let m = compose_word(w);
    let mz = m.mul_vec(z.coords());
    let neg: Vec<i64> = z.coords().iter().map(|x| -x).collect();
    Ok(mz == z.coords() || mz == neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(v: &[i64]) -> HomologyClass {
        HomologyClass::new(v.to_vec()).unwrap()
    }

    #[test]
    fn torus_twist_matrices() {
        let m = twist_matrix(&cls(&[1, 0]), Handedness::Right);
        assert_eq!(m, SquareMatrix::from_rows(&[&[1, -1], &[0, 1]]));
        let m = twist_matrix(&cls(&[2, -1]), Handedness::Right);
        assert_eq!(m, SquareMatrix::from_rows(&[&[-1, -4], &[1, 3]]));
    }

    #[test]
    fn twist_matrices_are_symplectic() {
        for c in [cls(&[1, 0]), cls(&[2, -1]), cls(&[3, 5]), cls(&[1, 1, 2, 0])] {
            for h in [Handedness::Right, Handedness::Left] {
                let m = twist_matrix(&c, h);
                let j = symplectic_form(c.genus());
                assert_eq!(m.transpose().mul(&j).mul(&m), j);
            }
        }
    }

    #[test]
    fn composition_convention_oracle() {
        // Word tau_{a+b} tau_{2b-a} tau_{2a-b} on the torus, rightmost first.
        // Independent oracle: multiply hand-computed transvection matrices.
        let word = TwistWord::new(vec![
            (cls(&[1, 1]), Handedness::Right),
            (cls(&[-1, 2]), Handedness::Right),
            (cls(&[2, -1]), Handedness::Right),
        ])
        .unwrap();
        let m = compose_word(&word);
        assert_eq!(m, SquareMatrix::from_rows(&[&[1, 9], &[0, 1]]));

        // Guard: the reversed (wrong) convention has trace -52.
        let rev = TwistWord::new(vec![
            (cls(&[2, -1]), Handedness::Right),
            (cls(&[-1, 2]), Handedness::Right),
            (cls(&[1, 1]), Handedness::Right),
        ])
        .unwrap();
        assert_eq!(compose_word(&rev).trace(), -52);
    }

    #[test]
    fn round_handle_check_cp2_word() {
        let word = TwistWord::new(vec![
            (cls(&[1, 1]), Handedness::Right),
            (cls(&[-1, 2]), Handedness::Right),
            (cls(&[2, -1]), Handedness::Right),
        ])
        .unwrap();
        assert!(round_handle_check(&word, &cls(&[1, 0])).unwrap());
        assert!(!round_handle_check(&word, &cls(&[0, 1])).unwrap());
    }

    #[test]
    fn inverse_word_composes_to_identity() {
        let word = TwistWord::new(vec![
            (cls(&[1, 2]), Handedness::Right),
            (cls(&[0, 1]), Handedness::Left),
            (cls(&[3, -1]), Handedness::Right),
        ])
        .unwrap();
        let m = compose_word(&word).mul(&compose_word(&word.inverse()));
        assert_eq!(m, SquareMatrix::identity(2));
    }

    #[test]
    fn pairing_genus_mismatch() {
        assert_eq!(
            intersection_pairing(&cls(&[1, 0]), &cls(&[1, 0, 0, 0])),
            Err(McgError::GenusMismatch(1, 2))
        );
    }
}
