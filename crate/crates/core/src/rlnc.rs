//! Random linear network coding over a prime field.
//!
//! A file payload is an m-by-l matrix of symbols in F_p. Augmentation
//! prepends a unit coding prefix to each row, so every packet carries its
//! own global coding vector; recombination mixes packets with random
//! coefficients and the prefix tracks them automatically. Any m packets
//! whose coding prefixes are independent recover the file by Gauss-Jordan
//! elimination. A fixed big-endian wire format serialises packets
//! byte-exactly.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::modmath::mod_inverse;

/// Errors from payload construction, coding operations, and serialisation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RlncError {
    /// Field primes below 2 admit no field.
    #[error("field prime must be at least 2")]
    FieldTooSmall,
    /// Payloads and packets need at least one row and one data symbol.
    #[error("payload needs at least one row and one column, got {m} x {l}")]
    EmptyShape { m: usize, l: usize },
    /// All payload rows must share one length.
    #[error("row {row} has length {got}, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    /// Payload symbols must already be reduced into [0, p).
    #[error("symbol at ({row}, {col}) is not reduced modulo the field prime")]
    SymbolOutOfRange { row: usize, col: usize },
    /// Packet symbols must already be reduced into [0, p).
    #[error("packet symbol {index} is not reduced modulo the field prime")]
    PacketSymbolOutOfRange { index: usize },
    /// Coding operations need at least one packet.
    #[error("packet list is empty")]
    NoPackets,
    /// All packets in one operation must agree on prime and shape.
    #[error("packets disagree on field prime or shape")]
    MixedDimensions,
    /// Recombination takes exactly one coefficient per packet.
    #[error("expected {packets} coefficients, got {coeffs}")]
    CoefficientCount { packets: usize, coeffs: usize },
    /// Coefficients must be reduced into [0, p).
    #[error("coefficient {index} is not reduced modulo the field prime")]
    CoefficientOutOfRange { index: usize },
    /// Decoding needs m independent coding prefixes.
    #[error("insufficient degrees of freedom: coding rank {rank} of {needed}")]
    InsufficientRank { rank: usize, needed: usize },
    /// No single payload explains every packet — some input is corrupted.
    #[error("packets are mutually inconsistent: no payload spans them all")]
    InconsistentPackets,
    /// The wire format stores m and l as 32-bit counts.
    #[error("shape exceeds the wire format's 32-bit counts")]
    ShapeOverflow,
    /// The byte codec needs at least one full byte per symbol.
    #[error("field prime narrower than 9 bits cannot carry file bytes")]
    FieldTooNarrowForBytes,
    /// A symbol too wide for the byte codec (not produced by `from_bytes`).
    #[error("symbol does not fit the byte codec width")]
    SymbolTooWide,
    /// Wire bytes that do not parse as a packet.
    #[error("wire data malformed: {0}")]
    Malformed(&'static str),
}

/// Original file content as an m-by-l matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilePayload {
    p: BigUint,
    rows: Vec<Vec<BigUint>>,
}

impl FilePayload {
    /// Validates shape and symbol range. The prime itself is the caller's
    /// contract; field inverses assume it.
    pub fn new(p: BigUint, rows: Vec<Vec<BigUint>>) -> Result<Self, RlncError> {
        if p < BigUint::from(2u32) {
            return Err(RlncError::FieldTooSmall);
        }
        let m = rows.len();
        let l = rows.first().map_or(0, Vec::len);
        if m == 0 || l == 0 {
            return Err(RlncError::EmptyShape { m, l });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != l {
                return Err(RlncError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: l,
                });
            }
            for (j, sym) in row.iter().enumerate() {
                if *sym >= p {
                    return Err(RlncError::SymbolOutOfRange { row: i, col: j });
                }
            }
        }
        Ok(FilePayload { p, rows })
    }

    /// Uniformly random payload, mainly for simulations and tests.
    pub fn random<R: Rng + ?Sized>(
        p: &BigUint,
        m: usize,
        l: usize,
        rng: &mut R,
    ) -> Result<Self, RlncError> {
        if *p < BigUint::from(2u32) {
            return Err(RlncError::FieldTooSmall);
        }
        if m == 0 || l == 0 {
            return Err(RlncError::EmptyShape { m, l });
        }
        let rows = (0..m)
            .map(|_| (0..l).map(|_| rng.gen_biguint_below(p)).collect())
            .collect();
        Ok(FilePayload { p: p.clone(), rows })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn l(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }

    /// Packs raw bytes into an m-row payload. Each symbol carries
    /// floor((bits(p) - 1) / 8) bytes, guaranteeing it stays below p, and
    /// the stream is prefixed with an 8-byte big-endian length so
    /// [`FilePayload::to_bytes`] can strip the zero padding again.
    pub fn from_bytes(data: &[u8], m: usize, p: &BigUint) -> Result<Self, RlncError> {
        if m == 0 {
            return Err(RlncError::EmptyShape { m, l: 0 });
        }
        let width = byte_codec_width(p)?;
        let mut stream = Vec::with_capacity(8 + data.len());
        stream.extend_from_slice(&(data.len() as u64).to_be_bytes());
        stream.extend_from_slice(data);
        let symbols = stream.len().div_ceil(width);
        let l = symbols.div_ceil(m).max(1);
        stream.resize(m * l * width, 0);
        let rows = stream
            .chunks(l * width)
            .map(|row| row.chunks(width).map(BigUint::from_bytes_be).collect())
            .collect();
        Ok(FilePayload { p: p.clone(), rows })
    }

    /// Inverse of [`FilePayload::from_bytes`]: re-serialises symbols and
    /// strips padding using the embedded length header.
    pub fn to_bytes(&self) -> Result<Vec<u8>, RlncError> {
        let width = byte_codec_width(&self.p)?;
        let mut stream = Vec::with_capacity(self.m() * self.l() * width);
        for row in &self.rows {
            for sym in row {
                if sym.bits() > 8 * width as u64 {
                    return Err(RlncError::SymbolTooWide);
                }
                stream.extend_from_slice(&to_fixed_be(sym, width));
            }
        }
        if stream.len() < 8 {
            return Err(RlncError::Malformed("stream shorter than length header"));
        }
        let len = u64::from_be_bytes(stream[..8].try_into().expect("checked length")) as usize;
        if len > stream.len() - 8 {
            return Err(RlncError::Malformed("length header exceeds payload"));
        }
        Ok(stream[8..8 + len].to_vec())
    }

    /// Whether `packet` is exactly the combination of source rows named by
    /// its coding prefix — the ground truth for contamination. Augmented
    /// sources have unit prefixes, so a packet lies in their span if and
    /// only if its data part equals the prefix-weighted row sum.
    pub fn spans(&self, packet: &CodedPacket) -> bool {
        if packet.p != self.p || packet.m != self.m() || packet.l() != self.l() {
            return false;
        }
        let m = self.m();
        for j in 0..self.l() {
            let mut expected = BigUint::zero();
            for (i, row) in self.rows.iter().enumerate() {
                if !packet.symbols[i].is_zero() && !row[j].is_zero() {
                    expected = (expected + &packet.symbols[i] * &row[j]) % &self.p;
                }
            }
            if packet.symbols[m + j] != expected {
                return false;
            }
        }
        true
    }
}

/// One coded packet: coding prefix (length m) followed by data symbols,
/// all in F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    p: BigUint,
    m: usize,
    symbols: Vec<BigUint>,
}

impl CodedPacket {
    /// Validates the shape (m >= 1, at least one data symbol, 32-bit wire
    /// counts) and that every symbol is reduced.
    pub fn new(p: BigUint, m: usize, symbols: Vec<BigUint>) -> Result<Self, RlncError> {
        if p < BigUint::from(2u32) {
            return Err(RlncError::FieldTooSmall);
        }
        if m == 0 || symbols.len() <= m {
            return Err(RlncError::EmptyShape {
                m,
                l: symbols.len().saturating_sub(m),
            });
        }
        let l = symbols.len() - m;
        if m > u32::MAX as usize || l > u32::MAX as usize {
            return Err(RlncError::ShapeOverflow);
        }
        for (i, sym) in symbols.iter().enumerate() {
            if *sym >= p {
                return Err(RlncError::PacketSymbolOutOfRange { index: i });
            }
        }
        Ok(CodedPacket { p, m, symbols })
    }

    /// Uniformly random packet of the given shape — what a Byzantine node
    /// injects: wire-format-valid but almost surely outside the source span.
    pub fn random<R: Rng + ?Sized>(
        p: &BigUint,
        m: usize,
        l: usize,
        rng: &mut R,
    ) -> Result<Self, RlncError> {
        let symbols = (0..m + l).map(|_| rng.gen_biguint_below(p)).collect();
        CodedPacket::new(p.clone(), m, symbols)
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.symbols.len() - self.m
    }

    /// All symbols: coding prefix followed by data.
    pub fn symbols(&self) -> &[BigUint] {
        &self.symbols
    }

    /// Global coding vector (the first m symbols).
    pub fn coding_vector(&self) -> &[BigUint] {
        &self.symbols[..self.m]
    }

    /// Data symbols (everything after the coding prefix).
    pub fn data(&self) -> &[BigUint] {
        &self.symbols[self.m..]
    }

    /// Serialises the packet to the fixed wire format:
    /// magic `NCG1`, element byte width as u16 big-endian, the field prime p
    /// in exactly that many bytes, m and l as u32 big-endian counts, then
    /// all m + l symbols as fixed-width big-endian elements.
    pub fn to_wire_bytes(&self) -> Vec<u8> {
        let width = element_width(&self.p);
        let mut out = Vec::with_capacity(4 + 2 + width + 8 + self.symbols.len() * width);
        out.extend_from_slice(WIRE_MAGIC);
        out.extend_from_slice(&(width as u16).to_be_bytes());
        out.extend_from_slice(&to_fixed_be(&self.p, width));
        out.extend_from_slice(&(self.m as u32).to_be_bytes());
        out.extend_from_slice(&(self.l() as u32).to_be_bytes());
        for sym in &self.symbols {
            out.extend_from_slice(&to_fixed_be(sym, width));
        }
        out
    }

    /// Parses and fully validates a wire-format packet: magic, canonical
    /// element width, non-trivial shape, exact body length, and every
    /// element reduced below p.
    pub fn from_wire_bytes(bytes: &[u8]) -> Result<Self, RlncError> {
        let mut cursor = bytes;
        let magic = take(&mut cursor, 4, "truncated magic")?;
        if magic != WIRE_MAGIC {
            return Err(RlncError::Malformed("bad magic"));
        }
        let width_bytes = take(&mut cursor, 2, "truncated element width")?;
        let width = u16::from_be_bytes(width_bytes.try_into().expect("checked length")) as usize;
        if width == 0 {
            return Err(RlncError::Malformed("zero element width"));
        }
        let p = BigUint::from_bytes_be(take(&mut cursor, width, "truncated field prime")?);
        if p < BigUint::from(2u32) {
            return Err(RlncError::Malformed("field prime below 2"));
        }
        if element_width(&p) != width {
            return Err(RlncError::Malformed(
                "element width does not match field prime",
            ));
        }
        let m_bytes = take(&mut cursor, 4, "truncated m count")?;
        let m = u32::from_be_bytes(m_bytes.try_into().expect("checked length")) as usize;
        let l_bytes = take(&mut cursor, 4, "truncated l count")?;
        let l = u32::from_be_bytes(l_bytes.try_into().expect("checked length")) as usize;
        if m == 0 || l == 0 {
            return Err(RlncError::Malformed("empty shape"));
        }
        if (cursor.len() as u64) != (m as u64 + l as u64) * width as u64 {
            return Err(RlncError::Malformed("body length mismatch"));
        }
        let mut symbols = Vec::with_capacity(m + l);
        for chunk in cursor.chunks(width) {
            let sym = BigUint::from_bytes_be(chunk);
            if sym >= p {
                return Err(RlncError::Malformed(
                    "element not reduced below field prime",
                ));
            }
            symbols.push(sym);
        }
        Ok(CodedPacket { p, m, symbols })
    }
}

const WIRE_MAGIC: &[u8; 4] = b"NCG1";

/// Wire element width in bytes: ceil(bits(p) / 8).
fn element_width(p: &BigUint) -> usize {
    (p.bits() as usize).div_ceil(8)
}

/// Byte-codec symbol width: floor((bits(p) - 1) / 8), so a full symbol of
/// that many bytes is always below p.
fn byte_codec_width(p: &BigUint) -> Result<usize, RlncError> {
    if *p < BigUint::from(2u32) {
        return Err(RlncError::FieldTooSmall);
    }
    let width = ((p.bits() - 1) / 8) as usize;
    if width == 0 {
        Err(RlncError::FieldTooNarrowForBytes)
    } else {
        Ok(width)
    }
}

/// Big-endian encoding left-padded with zeros to exactly `width` bytes.
fn to_fixed_be(n: &BigUint, width: usize) -> Vec<u8> {
    let bytes = n.to_bytes_be();
    debug_assert!(bytes.len() <= width);
    let mut out = vec![0u8; width];
    out[width - bytes.len()..].copy_from_slice(&bytes);
    out
}

fn take<'a>(cursor: &mut &'a [u8], n: usize, context: &'static str) -> Result<&'a [u8], RlncError> {
    if cursor.len() < n {
        return Err(RlncError::Malformed(context));
    }
    let (head, tail) = cursor.split_at(n);
    *cursor = tail;
    Ok(head)
}

/// Turns the payload's m rows into m augmented packets, packet i carrying
/// the unit coding prefix e_i followed by row i.
pub fn augment(payload: &FilePayload) -> Vec<CodedPacket> {
    let m = payload.m();
    payload
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut symbols = vec![BigUint::zero(); m];
            symbols[i] = BigUint::one();
            symbols.extend(row.iter().cloned());
            CodedPacket {
                p: payload.p.clone(),
                m,
                symbols,
            }
        })
        .collect()
}

/// Linear combination sum(coeffs[j] * packets[j]) over F_p. The coding
/// prefix of the result tracks the coefficients applied to each source row.
pub fn recombine(packets: &[CodedPacket], coeffs: &[BigUint]) -> Result<CodedPacket, RlncError> {
    let first = packets.first().ok_or(RlncError::NoPackets)?;
    check_uniform(packets)?;
    if coeffs.len() != packets.len() {
        return Err(RlncError::CoefficientCount {
            packets: packets.len(),
            coeffs: coeffs.len(),
        });
    }
    for (i, c) in coeffs.iter().enumerate() {
        if *c >= first.p {
            return Err(RlncError::CoefficientOutOfRange { index: i });
        }
    }
    let mut symbols = vec![BigUint::zero(); first.symbols.len()];
    for (packet, c) in packets.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (acc, sym) in symbols.iter_mut().zip(&packet.symbols) {
            if !sym.is_zero() {
                *acc = (&*acc + &(c * sym) % &first.p) % &first.p;
            }
        }
    }
    Ok(CodedPacket {
        p: first.p.clone(),
        m: first.m,
        symbols,
    })
}

/// Recombination with coefficients drawn uniformly from F_p (zero included;
/// callers that need a nonzero combination resample).
pub fn random_recombine<R: Rng + ?Sized>(
    packets: &[CodedPacket],
    rng: &mut R,
) -> Result<CodedPacket, RlncError> {
    let first = packets.first().ok_or(RlncError::NoPackets)?;
    let coeffs: Vec<BigUint> = (0..packets.len())
        .map(|_| rng.gen_biguint_below(&first.p))
        .collect();
    recombine(packets, &coeffs)
}

/// Rank over F_p of the stacked packet vectors (full width, prefix plus
/// data).
pub fn rank(packets: &[CodedPacket]) -> Result<usize, RlncError> {
    if packets.is_empty() {
        return Err(RlncError::NoPackets);
    }
    check_uniform(packets)?;
    let p = packets[0].p.clone();
    let width = packets[0].symbols.len();
    let mut matrix: Vec<Vec<BigUint>> = packets.iter().map(|pk| pk.symbols.clone()).collect();
    Ok(gauss_jordan(&mut matrix, &p, width).len())
}

/// Recovers the file payload from packets whose coding prefixes span F_p^m,
/// by Gauss-Jordan elimination pivoting on the prefix columns. A packet set
/// that no single payload explains (a corrupted packet mixed with genuine
/// ones) leaves a reduced row with an empty prefix but leftover data, which
/// is rejected rather than silently discarded.
pub fn decode(packets: &[CodedPacket]) -> Result<FilePayload, RlncError> {
    if packets.is_empty() {
        return Err(RlncError::NoPackets);
    }
    check_uniform(packets)?;
    let p = packets[0].p.clone();
    let m = packets[0].m;
    let mut matrix: Vec<Vec<BigUint>> = packets.iter().map(|pk| pk.symbols.clone()).collect();
    let pivots = gauss_jordan(&mut matrix, &p, m);
    if pivots.len() < m {
        return Err(RlncError::InsufficientRank {
            rank: pivots.len(),
            needed: m,
        });
    }
    let pivot_rows: Vec<usize> = pivots.iter().map(|&(row, _)| row).collect();
    for (index, row) in matrix.iter().enumerate() {
        if !pivot_rows.contains(&index) && row.iter().any(|v| !v.is_zero()) {
            return Err(RlncError::InconsistentPackets);
        }
    }
    let mut rows = vec![Vec::new(); m];
    for (row, col) in pivots {
        rows[col] = matrix[row][m..].to_vec();
    }
    Ok(FilePayload { p, rows })
}

fn check_uniform(packets: &[CodedPacket]) -> Result<(), RlncError> {
    let first = &packets[0];
    if packets
        .iter()
        .any(|pk| pk.p != first.p || pk.m != first.m || pk.symbols.len() != first.symbols.len())
    {
        return Err(RlncError::MixedDimensions);
    }
    Ok(())
}

/// In-place Gauss-Jordan elimination over F_p restricted to the first
/// `pivot_cols` columns. Returns the pivot (row, column) pairs; pivot rows
/// end up normalised with zeros above and below each pivot. Assumes p prime.
fn gauss_jordan(
    matrix: &mut [Vec<BigUint>],
    p: &BigUint,
    pivot_cols: usize,
) -> Vec<(usize, usize)> {
    let total_cols = matrix.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..pivot_cols {
        let Some(found) = (next_row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(next_row, found);
        let inv = mod_inverse(&matrix[next_row][col], p)
            .expect("nonzero pivot has an inverse modulo a prime");
        for cell in &mut matrix[next_row][col..] {
            *cell = &*cell * &inv % p;
        }
        let pivot_row = matrix[next_row].clone();
        for (r, row) in matrix.iter_mut().enumerate() {
            if r == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..total_cols {
                let sub = &factor * &pivot_row[c] % p;
                row[c] = (&row[c] + p - &sub) % p;
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == matrix.len() {
            break;
        }
    }
    pivots
}
