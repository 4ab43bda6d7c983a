// Client-side grammar checks only; every verdict about a certificate comes
// from the API. A query is either a bare 64-hex hash or a payload URI.

const BARE_HEX = /^[0-9a-fA-F]{64}$/;
const PAYLOAD_URI = /^certchain:\/\/v1\/([0-9a-fA-F]{64})$/;

export type QueryCheck =
  | { ok: true; query: string }
  | { ok: false; error: string };

export function checkQuery(text: string): QueryCheck {
  const trimmed = text.trim();
  if (trimmed === "") {
    return { ok: false, error: "Enter a certificate hash or scan a QR code" };
  }
  if (BARE_HEX.test(trimmed)) {
    return { ok: true, query: trimmed.toLowerCase() };
  }
  const match = PAYLOAD_URI.exec(trimmed);
  if (match) {
    return { ok: true, query: match[1].toLowerCase() };
  }
  if (trimmed.startsWith("certchain://")) {
    return { ok: false, error: "Payload must look like certchain://v1/<64 hex characters>" };
  }
  return { ok: false, error: "Hash must be 64 hex characters" };
}
