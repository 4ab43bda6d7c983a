export interface CertificateRecord {
  serial: string;
  student_name: string;
  student_id: string;
  degree_title: string;
  major: string;
  grade: string;
  graduation_date: string;
  institution_id: string;
  issued_at: number;
  extras: Record<string, string>;
}

export type VerificationStatus = "valid" | "superseded" | "not_found";

export interface VerificationResult {
  status: VerificationStatus;
  certificate: CertificateRecord | null;
  certificate_hash: string | null;
  trail: string[];
  message?: string;
}

export interface IssueResponse {
  certificate_hash: string;
  qr_payload: string;
}

export interface CorrectionResponse {
  new_certificate_hash: string;
  correction_block_hash: string;
}

export const RECORD_FIELDS: Array<{ key: keyof CertificateRecord; label: string }> = [
  { key: "serial", label: "Serial" },
  { key: "student_name", label: "Student name" },
  { key: "student_id", label: "Student ID" },
  { key: "degree_title", label: "Degree title" },
  { key: "major", label: "Major" },
  { key: "grade", label: "Grade" },
  { key: "graduation_date", label: "Graduation date" },
  { key: "institution_id", label: "Institution" },
];

export function emptyRecord(): CertificateRecord {
  return {
    serial: "",
    student_name: "",
    student_id: "",
    degree_title: "",
    major: "",
    grade: "",
    graduation_date: "",
    institution_id: "",
    issued_at: 0,
    extras: {},
  };
}
