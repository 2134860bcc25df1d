use std::net::{Ipv4Addr, Ipv6Addr};

use rand::{Rng, RngExt};

use super::words::{DOMAINS, FIRST_NAMES, LAST_NAMES, STREET_KINDS, STREET_NAMES};
use super::{Result, SynthError};

/// Every label [`gen_entity`] can produce.
pub const SYNTH_LABELS: [&str; 16] = [
    "ADDRESS",
    "BITCOIN_ADDRESS",
    "CREDITCARDNUMBER",
    "EMAIL",
    "ETHEREUM_ADDRESS",
    "IBAN",
    "IDCARDNUM",
    "IPV4",
    "IPV4_PRIVATE",
    "IPV4_PUBLIC",
    "IPV6",
    "LITECOIN_ADDRESS",
    "NAME",
    "PASSPORT",
    "PHONE",
    "POLYGON_ADDRESS",
];

const BASE58: &[u8] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
const BECH32: &[u8] = b"qpzry9x8gf2tvdw0s3jn54khce6mua7l";
const HEX: &[u8] = b"0123456789abcdef";
const DNI_LETTERS: &[u8] = b"TRWAGMYFPDXBNJZSQVHLCKE";
const UPPER: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// (country, BBAN layout) where `9` is a digit and `A` an uppercase letter.
const IBAN_FORMATS: [(&str, &str); 5] = [
    ("DE", "999999999999999999"),
    ("ES", "99999999999999999999"),
    ("FR", "99999999999999999999999"),
    ("GB", "AAAA99999999999999"),
    ("NL", "AAAA9999999999"),
];

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

fn draw<R: Rng + ?Sized>(rng: &mut R, alphabet: &[u8], n: usize) -> String {
    (0..n)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())] as char)
        .collect()
}

fn digits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> String {
    draw(rng, b"0123456789", n)
}

/// ISO 13616 remainder of the rearranged IBAN, letters expanded to 10..35.
pub fn iban_mod97(iban: &str) -> Option<u32> {
    if iban.len() < 5 || !iban.is_ascii() {
        return None;
    }
    let (head, tail) = iban.split_at(4);
    let mut rem = 0u32;
    for c in tail.chars().chain(head.chars()) {
        let v = c.to_digit(36)?;
        rem = if v >= 10 {
            (rem * 100 + v) % 97
        } else {
            (rem * 10 + v) % 97
        };
    }
    Some(rem)
}

fn iban<R: Rng + ?Sized>(rng: &mut R) -> String {
    let (country, layout) = IBAN_FORMATS[rng.random_range(0..IBAN_FORMATS.len())];
    let bban: String = layout
        .bytes()
        .map(|b| match b {
            b'A' => UPPER[rng.random_range(0..UPPER.len())] as char,
            _ => char::from(b'0' + rng.random_range(0..10u8)),
        })
        .collect();
    let rem = iban_mod97(&format!("{country}00{bban}")).expect("ascii alphanumeric");
    format!("{country}{:02}{bban}", 98 - rem)
}

fn luhn_check_digit(payload: &str) -> u32 {
    let sum: u32 = payload
        .chars()
        .rev()
        .enumerate()
        .map(|(i, c)| {
            let d = c.to_digit(10).expect("digit");
            if i % 2 == 0 {
                let d2 = d * 2;
                if d2 > 9 {
                    d2 - 9
                } else {
                    d2
                }
            } else {
                d
            }
        })
        .sum();
    (10 - sum % 10) % 10
}

fn credit_card<R: Rng + ?Sized>(rng: &mut R) -> String {
    let prefix = if rng.random_bool(0.5) {
        "4".to_string()
    } else {
        format!("5{}", rng.random_range(1..=5u8))
    };
    let payload = format!("{prefix}{}", digits(rng, 15 - prefix.len()));
    let number = format!("{payload}{}", luhn_check_digit(&payload));
    let groups: Vec<&str> = (0..4).map(|i| &number[i * 4..i * 4 + 4]).collect();
    groups.join(" ")
}

pub fn is_private_ipv4(ip: Ipv4Addr) -> bool {
    let [a, b, ..] = ip.octets();
    a == 10 || (a == 172 && (16..=31).contains(&b)) || (a == 192 && b == 168)
}

/// Globally routable unicast: excludes private, loopback, link-local,
/// shared (100.64/10), "this network" (0/8) and 224/3.
pub fn is_public_ipv4(ip: Ipv4Addr) -> bool {
    let [a, b, ..] = ip.octets();
    !(is_private_ipv4(ip)
        || a == 0
        || a == 127
        || a >= 224
        || (a == 169 && b == 254)
        || (a == 100 && (64..=127).contains(&b)))
}

fn ipv4_private<R: Rng + ?Sized>(rng: &mut R) -> Ipv4Addr {
    let o = |rng: &mut R| rng.random_range(0..=255u8);
    match rng.random_range(0..3u8) {
        0 => Ipv4Addr::new(10, o(rng), o(rng), o(rng)),
        1 => Ipv4Addr::new(172, rng.random_range(16..=31u8), o(rng), o(rng)),
        _ => Ipv4Addr::new(192, 168, o(rng), o(rng)),
    }
}

fn ipv4_public<R: Rng + ?Sized>(rng: &mut R) -> Ipv4Addr {
    loop {
        let ip = Ipv4Addr::from(rng.random::<u32>());
        if is_public_ipv4(ip) {
            return ip;
        }
    }
}

fn ipv6<R: Rng + ?Sized>(rng: &mut R) -> Ipv6Addr {
    // Non-zero groups, so the textual form never uses `::`.
    let mut g = [0u16; 8];
    for x in &mut g {
        *x = rng.random_range(1..=u16::MAX);
    }
    Ipv6Addr::new(g[0], g[1], g[2], g[3], g[4], g[5], g[6], g[7])
}

fn base58_address<R: Rng + ?Sized>(rng: &mut R, versions: &[u8]) -> String {
    let v = versions[rng.random_range(0..versions.len())] as char;
    format!("{v}{}", draw(rng, BASE58, 33))
}

fn email<R: Rng + ?Sized>(rng: &mut R) -> String {
    let first = pick(rng, FIRST_NAMES).to_lowercase();
    let last = pick(rng, LAST_NAMES).to_lowercase();
    let n = rng.random_range(1..=99u8);
    format!("{first}.{last}{n}@{}", pick(rng, DOMAINS))
}

/// One synthetic surface form for `label`.
pub fn gen_entity<R: Rng + ?Sized>(label: &str, rng: &mut R) -> Result<String> {
    Ok(match label {
        "ADDRESS" => format!(
            "{} {} {}",
            rng.random_range(1..=250u16),
            pick(rng, STREET_NAMES),
            pick(rng, STREET_KINDS)
        ),
        "BITCOIN_ADDRESS" => {
            if rng.random_bool(0.25) {
                format!("bc1q{}", draw(rng, BECH32, 38))
            } else {
                base58_address(rng, b"13")
            }
        }
        "CREDITCARDNUMBER" => credit_card(rng),
        "EMAIL" => email(rng),
        "ETHEREUM_ADDRESS" | "POLYGON_ADDRESS" => format!("0x{}", draw(rng, HEX, 40)),
        "IBAN" => iban(rng),
        "IDCARDNUM" => {
            let n = rng.random_range(0..100_000_000u32);
            format!("{n:08}{}", DNI_LETTERS[(n % 23) as usize] as char)
        }
        "IPV4" => Ipv4Addr::from(rng.random::<u32>()).to_string(),
        "IPV4_PRIVATE" => ipv4_private(rng).to_string(),
        "IPV4_PUBLIC" => ipv4_public(rng).to_string(),
        "IPV6" => ipv6(rng).to_string(),
        "LITECOIN_ADDRESS" => {
            if rng.random_bool(0.25) {
                format!("ltc1q{}", draw(rng, BECH32, 38))
            } else {
                base58_address(rng, b"LM")
            }
        }
        "NAME" => format!("{} {}", pick(rng, FIRST_NAMES), pick(rng, LAST_NAMES)),
        "PASSPORT" => format!("{}{}", draw(rng, UPPER, 3), digits(rng, 6)),
        "PHONE" => format!("+34 6{} {} {}", digits(rng, 2), digits(rng, 3), digits(rng, 3)),
        other => return Err(SynthError::UnsupportedLabel(other.to_owned())),
    })
}
