//! Discrete-log homomorphic signatures for network-coded packets.
//!
//! The signer holds one secret exponent per packet position. To sign a
//! file it finds a vector u orthogonal (over F_p) to every augmented source
//! packet and publishes x_i = u_i * alpha_i^-1 mod p. A packet w verifies
//! when prod_i h_i^(x_i * w_i) = 1 mod q, which holds exactly when
//! u . w = 0 mod p — true for every linear combination of the signed
//! packets and false for anything outside their span (up to the 1/p
//! hyperplane false-accept rate). Verifiers never learn the alphas, and
//! intermediate nodes can recombine freely without touching the signature.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::modmath::{mod_inverse, multi_exp, parse_biguint, GroupParams, ModMathError};
use crate::rlnc::CodedPacket;

/// Errors from key management, signing, and verification.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigError {
    #[error(transparent)]
    ModMath(#[from] ModMathError),
    /// Keys cover m + l >= 2 packet positions.
    #[error("key needs at least 2 exponents (one data row, one symbol), got {0}")]
    KeyTooShort(usize),
    /// Private exponents live in [1, p); zero has no inverse.
    #[error("private exponent {index} is not in [1, p)")]
    AlphaOutOfRange { index: usize },
    /// Public elements live in [1, q).
    #[error("public element {index} is not in [1, q)")]
    PublicElementOutOfRange { index: usize },
    /// The packet length must equal the key length.
    #[error("shape mismatch: key covers {key} symbols, packet has {packet}")]
    ShapeMismatch { key: usize, packet: usize },
    /// The packet field prime must equal the group's p.
    #[error("packet field prime differs from the group field prime")]
    FieldMismatch,
    /// Signing takes exactly the m augmented source packets.
    #[error("signing needs m source packets with m-wide prefixes, got {got} for m = {m}")]
    SourceCount { got: usize, m: usize },
    /// Source packets must carry unit coding prefixes.
    #[error("source packet {index} does not carry a unit coding prefix")]
    NotAugmented { index: usize },
    /// Source packets must agree on prime and shape.
    #[error("source packets disagree on field prime or shape")]
    MixedDimensions,
    /// Signature length must equal key length.
    #[error("signature covers {sig} symbols, key covers {key}")]
    SignatureShape { sig: usize, key: usize },
    /// The public key is not derived from the private key.
    #[error("public and private keys are not a pair")]
    KeyMismatch,
    /// Refresh fraction must be a real number in (0, 1].
    #[error("refresh fraction must lie in (0, 1]")]
    InvalidRho,
}

/// Private signing key: the group plus one secret exponent per packet
/// position (m + l of them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    params: GroupParams,
    alphas: Vec<BigUint>,
}

/// Public verification key: the group plus h_i = g^alpha_i mod q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    params: GroupParams,
    hs: Vec<BigUint>,
}

/// Per-file signature: the blinded orthogonal vector x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSignature {
    xs: Vec<BigUint>,
}

impl PrivateKey {
    /// Builds a key from explicit exponents, validating 1 <= alpha_i < p.
    pub fn from_alphas(params: GroupParams, alphas: Vec<BigUint>) -> Result<Self, SigError> {
        if alphas.len() < 2 {
            return Err(SigError::KeyTooShort(alphas.len()));
        }
        for (index, a) in alphas.iter().enumerate() {
            if a.is_zero() || *a >= params.p {
                return Err(SigError::AlphaOutOfRange { index });
            }
        }
        Ok(PrivateKey { params, alphas })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn alphas(&self) -> &[BigUint] {
        &self.alphas
    }

    /// Number of packet positions (m + l) the key covers.
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Derives the paired public key, h_i = g^alpha_i mod q.
    pub fn derive_public(&self) -> PublicKey {
        let hs = self
            .alphas
            .iter()
            .map(|a| self.params.g.modpow(a, &self.params.q))
            .collect();
        PublicKey {
            params: self.params.clone(),
            hs,
        }
    }
}

impl PublicKey {
    /// Builds a key from explicit group elements, validating 1 <= h_i < q.
    pub fn from_elements(params: GroupParams, hs: Vec<BigUint>) -> Result<Self, SigError> {
        if hs.len() < 2 {
            return Err(SigError::KeyTooShort(hs.len()));
        }
        for (index, h) in hs.iter().enumerate() {
            if h.is_zero() || *h >= params.q {
                return Err(SigError::PublicElementOutOfRange { index });
            }
        }
        Ok(PublicKey { params, hs })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn hs(&self) -> &[BigUint] {
        &self.hs
    }

    pub fn len(&self) -> usize {
        self.hs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hs.is_empty()
    }
}

impl FileSignature {
    /// Builds a signature from explicit elements in [0, p).
    pub fn from_xs(params: &GroupParams, xs: Vec<BigUint>) -> Result<Self, SigError> {
        if xs.len() < 2 {
            return Err(SigError::KeyTooShort(xs.len()));
        }
        for (index, x) in xs.iter().enumerate() {
            if *x >= params.p {
                return Err(SigError::AlphaOutOfRange { index });
            }
        }
        Ok(FileSignature { xs })
    }

    pub fn xs(&self) -> &[BigUint] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Draws a fresh key pair covering `n` packet positions: alpha_i uniform in
/// [1, p), h_i = g^alpha_i mod q.
pub fn keygen<R: Rng + ?Sized>(
    params: &GroupParams,
    n: usize,
    rng: &mut R,
) -> Result<(PrivateKey, PublicKey), SigError> {
    if n < 2 {
        return Err(SigError::KeyTooShort(n));
    }
    let one = BigUint::one();
    let alphas: Vec<BigUint> = (0..n)
        .map(|_| rng.gen_biguint_range(&one, &params.p))
        .collect();
    let private = PrivateKey {
        params: params.clone(),
        alphas,
    };
    let public = private.derive_public();
    Ok((private, public))
}

/// Signs a file given its m augmented source packets: finds a uniformly
/// random nonzero u in the null space of the packets and blinds it with the
/// inverse private exponents, x_i = u_i * alpha_i^-1 mod p.
pub fn sign_file<R: Rng + ?Sized>(
    key: &PrivateKey,
    sources: &[CodedPacket],
    rng: &mut R,
) -> Result<FileSignature, SigError> {
    let u = solve_orthogonal(key, sources, rng)?;
    let xs = u
        .iter()
        .zip(key.alphas.iter())
        .map(|(u_i, a_i)| {
            let inv = mod_inverse(a_i, &key.params.p).expect("alpha validated nonzero");
            u_i * inv % &key.params.p
        })
        .collect();
    Ok(FileSignature { xs })
}

/// Finds a uniformly random nonzero vector orthogonal to every source
/// packet. Because the sources carry unit prefixes, the data coordinates
/// are free variables: draw them uniformly (resampling an all-zero draw)
/// and each prefix coordinate is forced to the negated dot product with the
/// corresponding row.
fn solve_orthogonal<R: Rng + ?Sized>(
    key: &PrivateKey,
    sources: &[CodedPacket],
    rng: &mut R,
) -> Result<Vec<BigUint>, SigError> {
    let p = &key.params.p;
    let first = sources
        .first()
        .ok_or(SigError::SourceCount { got: 0, m: 0 })?;
    let m = first.m();
    if sources.len() != m {
        return Err(SigError::SourceCount {
            got: sources.len(),
            m,
        });
    }
    if sources
        .iter()
        .any(|s| s.p() != first.p() || s.symbols().len() != first.symbols().len())
    {
        return Err(SigError::MixedDimensions);
    }
    if *first.p() != *p {
        return Err(SigError::FieldMismatch);
    }
    let n = first.symbols().len();
    if n != key.alphas.len() {
        return Err(SigError::ShapeMismatch {
            key: key.alphas.len(),
            packet: n,
        });
    }
    for (index, source) in sources.iter().enumerate() {
        let prefix_ok = source.coding_vector().iter().enumerate().all(|(j, c)| {
            if j == index {
                c.is_one()
            } else {
                c.is_zero()
            }
        });
        if !prefix_ok {
            return Err(SigError::NotAugmented { index });
        }
    }

    let l = n - m;
    let suffix: Vec<BigUint> = loop {
        let draw: Vec<BigUint> = (0..l).map(|_| rng.gen_biguint_below(p)).collect();
        if draw.iter().any(|c| !c.is_zero()) {
            break draw;
        }
    };
    let mut u = Vec::with_capacity(n);
    for source in sources {
        let dot = source
            .data()
            .iter()
            .zip(&suffix)
            .fold(BigUint::zero(), |acc, (row_j, u_j)| (acc + row_j * u_j) % p);
        u.push((p - dot) % p);
    }
    u.extend(suffix);
    debug_assert!(sources.iter().all(|s| {
        s.symbols()
            .iter()
            .zip(&u)
            .fold(BigUint::zero(), |acc, (w, u_i)| (acc + w * u_i) % p)
            .is_zero()
    }));
    Ok(u)
}

/// Verifies one packet: d = prod_i h_i^(x_i * w_i mod p) mod q must equal 1.
/// Exponents are reduced modulo p (the subgroup order) before the
/// multi-exponentiation.
pub fn verify_packet(
    key: &PublicKey,
    signature: &FileSignature,
    packet: &CodedPacket,
) -> Result<bool, SigError> {
    if signature.xs.len() != key.hs.len() {
        return Err(SigError::SignatureShape {
            sig: signature.xs.len(),
            key: key.hs.len(),
        });
    }
    if packet.symbols().len() != key.hs.len() {
        return Err(SigError::ShapeMismatch {
            key: key.hs.len(),
            packet: packet.symbols().len(),
        });
    }
    if *packet.p() != key.params.p {
        return Err(SigError::FieldMismatch);
    }
    let p = &key.params.p;
    let exps: Vec<BigUint> = signature
        .xs
        .iter()
        .zip(packet.symbols())
        .map(|(x, w)| x * w % p)
        .collect();
    let d = multi_exp(&key.hs, &exps, &key.params.q)?;
    Ok(d.is_one())
}

/// Re-randomises a ceil(rho * n) subset of key positions: the chosen
/// indices get fresh alpha_i uniform in [1, p) and matching h_i. Signatures
/// issued under the old key stop verifying with overwhelming probability.
pub fn refresh_keys<R: Rng + ?Sized>(
    private: &PrivateKey,
    public: &PublicKey,
    rho: f64,
    rng: &mut R,
) -> Result<(PrivateKey, PublicKey), SigError> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(SigError::InvalidRho);
    }
    if private.params != public.params || private.alphas.len() != public.hs.len() {
        return Err(SigError::KeyMismatch);
    }
    let derived = private.derive_public();
    if derived.hs != public.hs {
        return Err(SigError::KeyMismatch);
    }
    let n = private.alphas.len();
    let count = ((rho * n as f64).ceil() as usize).clamp(1, n);
    let indices = rand::seq::index::sample(rng, n, count);
    let one = BigUint::one();
    let mut alphas = private.alphas.clone();
    let mut hs = public.hs.clone();
    for i in indices {
        let fresh = rng.gen_biguint_range(&one, &private.params.p);
        hs[i] = private.params.g.modpow(&fresh, &private.params.q);
        alphas[i] = fresh;
    }
    Ok((
        PrivateKey {
            params: private.params.clone(),
            alphas,
        },
        PublicKey {
            params: public.params.clone(),
            hs,
        },
    ))
}

/// Hex-encoded SHA-256 digest of a file's raw bytes; recorded alongside
/// signatures so consumers can tie a signature document to its payload.
pub fn file_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Private-key document: group parameters and exponents as hex strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrivateKeyFile {
    pub p: String,
    pub q: String,
    pub g: String,
    pub alphas: Vec<String>,
}

/// Public-key document: group parameters and elements as hex strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublicKeyFile {
    pub p: String,
    pub q: String,
    pub g: String,
    pub hs: Vec<String>,
}

/// Signature document: blinded orthogonal vector as hex strings plus the
/// payload digest it belongs to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureFile {
    pub xs: Vec<String>,
    pub file_digest: String,
}

impl PrivateKeyFile {
    pub fn from_key(key: &PrivateKey) -> Self {
        PrivateKeyFile {
            p: format!("{:x}", key.params.p),
            q: format!("{:x}", key.params.q),
            g: format!("{:x}", key.params.g),
            alphas: key.alphas.iter().map(|a| format!("{a:x}")).collect(),
        }
    }

    pub fn to_key(&self) -> Result<PrivateKey, SigError> {
        let params = parse_group(&self.p, &self.q, &self.g)?;
        let alphas = parse_hex_list(&self.alphas)?;
        PrivateKey::from_alphas(params, alphas)
    }
}

impl PublicKeyFile {
    pub fn from_key(key: &PublicKey) -> Self {
        PublicKeyFile {
            p: format!("{:x}", key.params.p),
            q: format!("{:x}", key.params.q),
            g: format!("{:x}", key.params.g),
            hs: key.hs.iter().map(|h| format!("{h:x}")).collect(),
        }
    }

    pub fn to_key(&self) -> Result<PublicKey, SigError> {
        let params = parse_group(&self.p, &self.q, &self.g)?;
        let hs = parse_hex_list(&self.hs)?;
        PublicKey::from_elements(params, hs)
    }
}

impl SignatureFile {
    pub fn from_signature(signature: &FileSignature, file_digest: String) -> Self {
        SignatureFile {
            xs: signature.xs.iter().map(|x| format!("{x:x}")).collect(),
            file_digest,
        }
    }

    /// Parses against the group the signature will be verified in.
    pub fn to_signature(&self, params: &GroupParams) -> Result<FileSignature, SigError> {
        let xs = parse_hex_list(&self.xs)?;
        FileSignature::from_xs(params, xs)
    }
}

fn parse_group(p: &str, q: &str, g: &str) -> Result<GroupParams, SigError> {
    let params = GroupParams {
        p: parse_hex_field(p)?,
        q: parse_hex_field(q)?,
        g: parse_hex_field(g)?,
    };
    params.validate()?;
    Ok(params)
}

fn parse_hex_list(items: &[String]) -> Result<Vec<BigUint>, SigError> {
    items.iter().map(|s| parse_hex_field(s)).collect()
}

/// Key documents store bare hex; an explicit 0x prefix is tolerated.
fn parse_hex_field(s: &str) -> Result<BigUint, SigError> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    if digits.is_empty() {
        return Err(SigError::ModMath(ModMathError::ParseBigInt(s.to_string())));
    }
    parse_biguint(&format!("0x{digits}")).map_err(SigError::ModMath)
}
