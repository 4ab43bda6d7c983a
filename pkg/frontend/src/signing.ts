// Client-side request signing. The key file is parsed in the browser and the
// seed lives only in this in-memory session object; it is never sent anywhere.

import { getPublicKeyAsync, signAsync } from "@noble/ed25519";

export interface Session {
  keyId: string;
  seed: Uint8Array;
  publicKeyHex: string;
}

function b64ToBytes(b64: string): Uint8Array {
  const bin = atob(b64);
  const out = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
  return out;
}

export function bytesToHex(bytes: Uint8Array): string {
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

export async function importKeyFile(text: string): Promise<Session> {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new Error("Key file is not valid JSON");
  }
  const record = data as Record<string, unknown>;
  if (
    typeof record.key_id !== "string" ||
    typeof record.secret_key !== "string" ||
    typeof record.public_key !== "string"
  ) {
    throw new Error("Key file must contain key_id, secret_key and public_key");
  }
  let seed: Uint8Array;
  let declaredPublic: Uint8Array;
  try {
    seed = b64ToBytes(record.secret_key);
    declaredPublic = b64ToBytes(record.public_key);
  } catch {
    throw new Error("Key material is not valid base64");
  }
  if (seed.length !== 32) {
    throw new Error("secret_key must decode to 32 bytes");
  }
  const derived = await getPublicKeyAsync(seed);
  if (bytesToHex(derived) !== bytesToHex(declaredPublic)) {
    throw new Error("public_key does not match secret_key");
  }
  return { keyId: record.key_id, seed, publicKeyHex: bytesToHex(derived) };
}

// The service verifies an Ed25519 signature over
// sha256(METHOD || path || timestamp || body).
export async function signRequest(
  session: Session,
  method: string,
  path: string,
  timestamp: number,
  body: string,
): Promise<string> {
  const enc = new TextEncoder();
  const parts = [
    enc.encode(method.toUpperCase()),
    enc.encode(path),
    enc.encode(String(timestamp)),
    enc.encode(body),
  ];
  const message = new Uint8Array(parts.reduce((n, p) => n + p.length, 0));
  let offset = 0;
  for (const part of parts) {
    message.set(part, offset);
    offset += part.length;
  }
  const digest = new Uint8Array(await crypto.subtle.digest("SHA-256", message));
  return bytesToHex(await signAsync(digest, session.seed));
}
