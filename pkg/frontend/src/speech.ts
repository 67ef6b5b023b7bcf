// Browser speech recognition (webkit-prefixed where needed). The
// transcript is always shown for confirmation before it is sent.

interface AlternativeLike {
  transcript: string;
}

export function extractTranscript(results: ArrayLike<ArrayLike<AlternativeLike>>): string {
  const parts: string[] = [];
  for (let i = 0; i < results.length; i += 1) {
    const alternatives = results[i];
    if (alternatives && alternatives.length > 0) {
      const first = alternatives[0];
      if (first) parts.push(first.transcript);
    }
  }
  return parts.join(' ').trim();
}

type RecognitionCtor = new () => {
  continuous: boolean;
  interimResults: boolean;
  lang: string;
  onresult: ((event: { results: ArrayLike<ArrayLike<AlternativeLike>> }) => void) | null;
  onerror: ((event: { error?: string }) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
};

function recognitionCtor(scope: Record<string, unknown>): RecognitionCtor | null {
  const ctor = scope['SpeechRecognition'] ?? scope['webkitSpeechRecognition'];
  return typeof ctor === 'function' ? (ctor as RecognitionCtor) : null;
}

export function speechSupported(scope: Record<string, unknown> = globalThis as never): boolean {
  return recognitionCtor(scope) !== null;
}

export interface Recognizer {
  start(): void;
  stop(): void;
}

export function createRecognizer(
  onTranscript: (text: string) => void,
  onError: (message: string) => void,
  onEnd: () => void,
  scope: Record<string, unknown> = globalThis as never,
): Recognizer | null {
  const Ctor = recognitionCtor(scope);
  if (!Ctor) return null;
  const recognition = new Ctor();
  recognition.continuous = false;
  recognition.interimResults = false;
  recognition.lang = 'en-US';
  recognition.onresult = (event) => {
    const transcript = extractTranscript(event.results);
    if (transcript) onTranscript(transcript);
  };
  recognition.onerror = (event) => onError(event.error ?? 'speech recognition failed');
  recognition.onend = onEnd;
  return recognition;
}
