// Mock API fixtures mirroring the service's verification responses.

import { CertificateRecord, VerificationResult } from "../src/types";

export const HASH_A = "a0".repeat(32);
export const HASH_B = "b1".repeat(32);
export const HASH_C = "c2".repeat(32);

export const SAMPLE_RECORD: CertificateRecord = {
  serial: "SER-0001",
  student_name: "Amina Rahman",
  student_id: "ST-2209",
  degree_title: "BSc in Computer Science",
  major: "Software Engineering",
  grade: "3.85/4.00",
  graduation_date: "2023-06-15",
  institution_id: "BRACU",
  issued_at: 1700000000,
  extras: { honors: "magna cum laude" },
};

export const VALID_RESULT: VerificationResult = {
  status: "valid",
  certificate: SAMPLE_RECORD,
  certificate_hash: HASH_A,
  trail: [HASH_A],
};

export const SUPERSEDED_RESULT: VerificationResult = {
  status: "superseded",
  certificate: { ...SAMPLE_RECORD, student_name: "Amina Rahman-Khan" },
  certificate_hash: HASH_C,
  trail: [HASH_A, HASH_B, HASH_C],
};

export const NOT_FOUND_RESULT: VerificationResult = {
  status: "not_found",
  certificate: null,
  certificate_hash: null,
  trail: ["ff".repeat(32)],
  message: "Certificate does not exist",
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
