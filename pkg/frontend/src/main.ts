import {
  ApiError,
  askQuestion,
  getNote,
  getSuggestions,
  historyExportUrl,
  listNotes,
} from './api';
import { computeSegments } from './highlight';
import { createRecognizer, speechSupported } from './speech';
import {
  UiState,
  answerReceived,
  askFailed,
  askStarted,
  initialState,
  noteSelected,
  suggestionsLoaded,
} from './state';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const noteList = el<HTMLUListElement>('note-list');
const noteTitle = el<HTMLHeadingElement>('note-title');
const noteBody = el<HTMLDivElement>('note-body');
const suggestionsBox = el<HTMLDivElement>('suggestions');
const chatLog = el<HTMLDivElement>('chat-log');
const askForm = el<HTMLFormElement>('ask-form');
const questionInput = el<HTMLInputElement>('question-input');
const askButton = el<HTMLButtonElement>('ask-btn');
const voiceButton = el<HTMLButtonElement>('voice-btn');
const voiceConfirm = el<HTMLDivElement>('voice-confirm');
const voiceTranscript = el<HTMLSpanElement>('voice-transcript');
const voiceSend = el<HTMLButtonElement>('voice-send');
const voiceCancel = el<HTMLButtonElement>('voice-cancel');
const exportButton = el<HTMLButtonElement>('export-btn');

let state: UiState = initialState();

function renderNote(): void {
  noteBody.textContent = '';
  for (const segment of computeSegments(state.noteBody, state.highlight)) {
    if (segment.marked) {
      const mark = document.createElement('mark');
      mark.textContent = segment.text;
      noteBody.appendChild(mark);
    } else {
      noteBody.appendChild(document.createTextNode(segment.text));
    }
  }
}

function renderSuggestions(): void {
  suggestionsBox.textContent = '';
  for (const suggestion of state.suggestions) {
    const chip = document.createElement('button');
    chip.type = 'button';
    chip.className = 'chip';
    chip.textContent = suggestion;
    chip.addEventListener('click', () => void ask(suggestion));
    suggestionsBox.appendChild(chip);
  }
}

function renderChat(): void {
  chatLog.textContent = '';
  for (const entry of state.chat) {
    const q = document.createElement('div');
    q.className = 'bubble question';
    q.textContent = entry.question;
    chatLog.appendChild(q);

    const a = document.createElement('div');
    if (entry.kind === 'error') {
      a.className = 'bubble error';
      a.textContent = entry.message ?? 'request failed';
    } else {
      a.className = 'bubble answer';
      a.textContent = entry.answer ?? '';
      if (!entry.verbatim) {
        const notice = document.createElement('div');
        notice.className = 'notice';
        notice.textContent = 'answer not found verbatim in the note';
        a.appendChild(notice);
      }
    }
    chatLog.appendChild(a);
  }
  chatLog.scrollTop = chatLog.scrollHeight;
}

function renderPending(): void {
  questionInput.disabled = state.pending;
  askButton.disabled = state.pending;
}

function setState(next: UiState): void {
  state = next;
  renderNote();
  renderSuggestions();
  renderChat();
  renderPending();
}

async function selectNote(id: string): Promise<void> {
  const note = await getNote(id);
  noteTitle.textContent = note.title || note.id;
  setState(noteSelected(state, note.id, note.body));
  for (const item of noteList.querySelectorAll('li')) {
    item.classList.toggle('selected', item.dataset['noteId'] === id);
  }
  try {
    const suggestions = await getSuggestions(id, 4);
    setState(suggestionsLoaded(state, suggestions));
  } catch {
    setState(suggestionsLoaded(state, []));
  }
}

async function ask(question: string): Promise<void> {
  const started = askStarted(state, question);
  if (!started) return;
  setState(started);
  const noteId = state.selectedNoteId as string;
  try {
    const resp = await askQuestion(noteId, question);
    setState(answerReceived(state, question, resp));
  } catch (err) {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : 'request failed';
    setState(askFailed(state, question, message));
  }
}

askForm.addEventListener('submit', (event) => {
  event.preventDefault();
  const question = questionInput.value;
  if (!question.trim()) return;
  questionInput.value = '';
  void ask(question);
});

exportButton.addEventListener('click', () => {
  const anchor = document.createElement('a');
  anchor.href = historyExportUrl();
  anchor.download = ''; // filename comes from the content-disposition header
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
});

// voice input: transcribe, show for confirmation, send only on confirm
if (!speechSupported()) {
  voiceButton.disabled = true;
  voiceButton.title = 'Speech recognition is not available in this browser';
} else {
  voiceButton.addEventListener('click', () => {
    const recognizer = createRecognizer(
      (transcript) => {
        voiceTranscript.textContent = transcript;
        voiceConfirm.hidden = false;
      },
      () => {
        voiceButton.classList.remove('listening');
      },
      () => {
        voiceButton.classList.remove('listening');
      },
    );
    if (!recognizer) return;
    voiceButton.classList.add('listening');
    recognizer.start();
  });
  voiceSend.addEventListener('click', () => {
    const transcript = voiceTranscript.textContent ?? '';
    voiceConfirm.hidden = true;
    if (transcript.trim()) void ask(transcript);
  });
  voiceCancel.addEventListener('click', () => {
    voiceConfirm.hidden = true;
    voiceTranscript.textContent = '';
  });
}

async function init(): Promise<void> {
  const summaries = await listNotes();
  noteList.textContent = '';
  for (const summary of summaries) {
    const item = document.createElement('li');
    item.dataset['noteId'] = summary.id;
    const title = document.createElement('strong');
    title.textContent = summary.title || summary.id;
    const preview = document.createElement('span');
    preview.textContent = summary.body_preview;
    item.append(title, preview);
    item.addEventListener('click', () => void selectNote(summary.id));
    noteList.appendChild(item);
  }
  if (summaries.length > 0) {
    const first = summaries[0];
    if (first) await selectNote(first.id);
  }
}

void init().catch((err) => {
  noteTitle.textContent = 'Failed to load notes';
  noteBody.textContent = String(err);
});
