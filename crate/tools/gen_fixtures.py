#!/usr/bin/env python3
"""Regenerates the bundled fixtures under crates/core/fixtures/.

Examples are written with inline markup: `{trigger}` marks the trigger and
`[role:phrase]` marks a role filler. Offsets are computed here so the JSON
never carries hand-counted spans.

Word vectors come from a fixed topic mixture: each word is a weighted sum
of random topic directions plus a small per-word perturbation, seeded so
the output is reproducible.
"""

import json
import random
import re
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"
DIM = 50
SEED = 20211018

MARK = re.compile(r"\{([^}]*)\}|\[([a-z_0-9]+):([^\]]*)\]")


def parse_marked(src):
    text, trigger, roles, pos = [], None, {}, 0
    last = 0
    for m in MARK.finditer(src):
        plain = src[last:m.start()]
        text.append(plain)
        pos += len(plain)
        if m.group(1) is not None:
            inner = m.group(1)
            trigger = [pos, pos + len(inner)]
        else:
            inner = m.group(3)
            roles[m.group(2)] = [pos, pos + len(inner)]
        text.append(inner)
        pos += len(inner)
        last = m.end()
    text.append(src[last:])
    assert trigger is not None, src
    return "".join(text), trigger, roles


def R(name, kind="required", examples=(), hint=None):
    return {"name": name, "kind": kind, "type_hint": hint, "examples": list(examples)}


def F(fid, pos, triggers, gloss, parents=(), roles=(), examples=(), builtin=None):
    frame = {"id": fid, "gloss": gloss}
    if pos:
        frame["pos"] = pos
    if builtin:
        frame["builtin"] = builtin
    frame["triggers"] = list(triggers)
    frame["parents"] = list(parents)
    frame["roles"] = [R("focal", "focal")] + list(roles)
    exs = []
    for e in examples:
        text, trig, rs = parse_marked(e)
        exs.append({"text": text, "trigger": trig, "roles": rs})
    frame["examples"] = exs
    return frame


OPT = "optional"

FRAMES = [
    # abstract roots
    F("event", "verb", ["happen", "occur"], "something that takes place",
      roles=[R("time", OPT, ["yesterday", "on monday", "in the morning"]),
             R("place", OPT, ["in the park", "at the beach", "in the street"])],
      examples=["The accident {happened} [time:yesterday]"]),
    F("entity", "noun", ["thing", "entity"], "anything that exists"),
    F("physical-object", "noun", ["object", "item"], "a tangible thing", ["entity"]),
    F("living-thing", "noun", ["creature", "organism"], "a living being", ["entity"]),
    F("motion", "verb", ["go", "travel"], "an entity changes location", ["event"],
      roles=[R("theme", examples=["the car", "the boy", "the train"])],
      examples=["[theme:The bus] {travels} [place:through the city]"]),
    F("cognition", "verb", ["think"], "a mental state or process", ["event"],
      examples=["She {thinks} about the problem"]),
    F("communication", "verb", ["say", "speak"], "conveying a message", ["event"],
      examples=["The teacher {spoke} to the class"]),
    F("perception", "verb", ["perceive", "sense"], "becoming aware through the senses", ["event"]),
    F("transfer", "verb", ["transfer"], "moving possession between parties", ["event"],
      roles=[R("recipient", OPT, ["the girl", "her friend"])]),
    F("commerce", "verb", ["trade"], "exchange of goods for money", ["event"],
      roles=[R("money", OPT, ["for ten dollars", "for a coin", "for money"])]),

    # the three senses of "get"
    F("arriving-at-a-location", "verb", ["get", "arrive", "reach"], "come to a place",
      ["motion"],
      roles=[R("theme", examples=["a player", "the train", "the runner"]),
             R("destination", examples=["to the goal", "at the station", "the finish line", "to the airport"])],
      examples=["[theme:The train] {arrived} [destination:at the station]",
                "[theme:The runner] {reached} [destination:the finish line]",
                "[theme:The striker] {got} [destination:to the goal]",
                "[theme:The plane] {arrived} [destination:at the airport]"]),
    F("acquire", "verb", ["get", "acquire", "obtain", "receive"], "come to have something",
      ["event"],
      roles=[R("recipient", examples=["the girl", "a player", "the family"]),
             R("theme", examples=["a ball", "a gift", "the book", "a new bike"]),
             R("source", OPT, ["from the store", "from her aunt"])],
      examples=["[recipient:The girl] {got} [theme:a new bike]",
                "[recipient:The family] {got} [theme:a dog]",
                "[recipient:The museum] {obtained} [theme:a painting]",
                "[recipient:The boy] {received} [theme:a gift] [source:from his aunt]"]),
    F("transition-to-state", "verb", ["get", "become", "turn"], "come to be in a condition",
      ["event"],
      roles=[R("entity", examples=["the milk", "the boy", "the dog"]),
             R("final_state", examples=["into trouble", "angry", "sour", "sick"])],
      examples=["[entity:The milk] {turned} [final_state:sour]",
                "[entity:The boy] {became} [final_state:angry]",
                "[entity:The dog] {got} [final_state:into trouble]"]),

    # the two senses of "take"
    F("taking", "verb", ["take", "grab", "seize"], "get hold of something and remove it",
      ["event"],
      roles=[R("agent", examples=["the boy", "a girl", "the man"]),
             R("theme", examples=["the ball", "a candy", "the toy"]),
             R("source", OPT, ["from the box", "from the shelf", "from the bowl"])],
      examples=["[agent:The boy] {took} [theme:the ball] [source:from the box]",
                "[agent:A girl] {grabbed} [theme:a candy] [source:from the bowl]",
                "[agent:The man] {seized} [theme:the toy] [source:from the shelf]"]),
    F("bringing", "verb", ["take", "bring", "carry"], "convey someone or something to a place",
      ["motion"],
      roles=[R("agent", examples=["the driver", "the father"]),
             R("theme", examples=["the passengers", "the luggage"]),
             R("destination", OPT, ["to the airport", "to the car", "to the station"])],
      examples=["[agent:The driver] {took} [theme:the passengers] [destination:to the airport]",
                "[agent:The father] {carried} [theme:the luggage] [destination:to the car]"]),

    # the two senses of "cookie"
    F("cookie-food", "noun", ["cookie", "biscuit"], "a small sweet baked treat", ["food"],
      roles=[R("ingredient", OPT, ["chocolate chip", "oatmeal"])],
      examples=["She baked a chocolate {cookie} in the oven",
                "The {biscuit} tasted of sugar and butter"]),
    F("cookie-data", "noun", ["cookie"], "a small data file a web browser stores",
      ["entity"],
      roles=[R("site", OPT, ["the website", "the server"])],
      examples=["The browser saved a {cookie} from the website",
                "The server reads the {cookie} to restore the login"]),

    # table targets
    F("helping", "verb", ["help", "assist", "aid"], "make it easier for someone to do something",
      ["event"],
      roles=[R("helper", examples=["person1", "the teacher", "a friend"]),
             R("benefited", examples=["person2", "the student", "her brother"]),
             R("goal", OPT, ["with the homework", "with the chores"])],
      examples=["[helper:The teacher] {helped} [benefited:the student] [goal:with the homework]",
                "[helper:A neighbor] {assisted} [benefited:the old woman] [goal:with the groceries]"]),
    F("thanking", "verb", ["thank"], "express gratitude to someone", ["communication"],
      roles=[R("thanker", examples=["person2", "the girl", "the student"]),
             R("thankee", examples=["person1", "her neighbor", "the teacher"]),
             R("reason", OPT, ["for the help", "for the gift"])],
      examples=["[thanker:The girl] {thanked} [thankee:her neighbor] [reason:for the help]",
                "[thanker:The student] {thanks} [thankee:the teacher] [reason:for the lesson]"]),
    F("covering", "verb", ["cover", "obscure", "hide"], "be on top of or in front of something",
      ["event"],
      roles=[R("coverer", examples=["object1", "the blanket", "the cloud"]),
             R("covered", examples=["object2", "the bed", "the sun"])],
      examples=["[coverer:The blanket] {covers} [covered:the bed]",
                "[coverer:A cloud] {obscured} [covered:the sun]",
                "[coverer:The curtain] {hides} [covered:the window]"]),
    F("seeing", "verb", ["see", "notice", "spot"], "perceive with the eyes", ["perception"],
      roles=[R("perceiver", examples=["someone", "the guard", "the child"]),
             R("phenomenon", examples=["object2", "the bird", "the light"])],
      examples=["[perceiver:The guard] {saw} [phenomenon:the thief]",
                "[perceiver:The child] {noticed} [phenomenon:a bird] [place:in the tree]"]),
    F("knowing", "verb", ["know"], "be aware of a fact", ["cognition"],
      roles=[R("cognizer", examples=["person1", "the student", "the detective"]),
             R("content", examples=["a fact", "the answer", "the truth"])],
      examples=["[cognizer:The student] {knew} [content:the answer]",
                "[cognizer:The detective] {knows} [content:the truth]"]),
    F("telling", "verb", ["tell", "inform"], "communicate information to someone",
      ["communication"],
      roles=[R("speaker", examples=["person2", "the teacher", "the mother"]),
             R("addressee", examples=["person1", "the class", "her son"]),
             R("message", examples=["the fact", "a story", "the secret"])],
      examples=["[speaker:The teacher] {told} [addressee:the class] [message:a story]",
                "[speaker:The mother] {tells} [addressee:her son] [message:the secret]"]),
    F("learning", "verb", ["learn", "discover"], "come to know something", ["cognition"],
      roles=[R("learner", examples=["person1", "the student", "the child"]),
             R("content", examples=["the fact", "the lesson", "the truth"])],
      examples=["[learner:The student] {learned} [content:the lesson]",
                "[learner:The child] {discovered} [content:the truth]"]),
    F("approaching", "verb", ["approach"], "come nearer to something", ["motion"],
      roles=[R("theme", examples=["animal1", "the wolf", "the car"]),
             R("goal", examples=["animal2", "the sheep", "the house"])],
      examples=["[theme:The wolf] {approached} [goal:the sheep]",
                "[theme:The car] {approaches} [goal:the house]"]),
    F("wanting", "verb", ["want", "desire", "wish"], "feel a desire for something", ["event"],
      roles=[R("experiencer", examples=["people", "the child", "person1"]),
             R("desired", examples=["to eat tasty food", "a toy", "to play outside"])],
      examples=["[experiencer:The child] {wants} [desired:a toy]",
                "[experiencer:People] {desire} [desired:comfort]"]),
    F("eating", "verb", ["eat", "consume", "devour"], "put food in the mouth and swallow it",
      ["event"],
      roles=[R("ingestor", examples=["people", "the dog", "the boy"]),
             R("ingestibles", examples=["tasty food", "an apple", "the cake"])],
      examples=["[ingestor:The dog] {ate} [ingestibles:the meat]",
                "[ingestor:The boy] {eats} [ingestibles:an apple]",
                "[ingestor:The guests] {devoured} [ingestibles:the cake]"]),
    F("feeling", "verb", ["feel"], "experience an emotion or sensation", ["event"],
      roles=[R("experiencer", examples=["animal2", "the girl", "the sheep"]),
             R("emotion", examples=["fear", "sad", "happy", "anger"])],
      examples=["[experiencer:The girl] {felt} [emotion:happy]",
                "[experiencer:The sheep] {feels} [emotion:fear]"]),
    F("size", "noun", ["size"], "how big something is", ["entity"],
      roles=[R("entity", examples=["of animal1", "of the house", "of the dog"])],
      examples=["The {size} [entity:of the house] surprised us"]),
    F("greater-than", "adj", ["greater than", "larger than", "bigger than", "more than"],
      "exceeds in amount or degree", builtin="gt",
      roles=[R("left"), R("right")],
      examples=["[left:The price] is {greater than} [right:the budget]"]),
    F("less-than", "adj", ["less than", "smaller than", "fewer than"],
      "falls below in amount or degree", builtin="lt",
      roles=[R("left"), R("right")],
      examples=["[left:The cost] is {less than} [right:the price]"]),
    F("equal-to", "adj", ["equal to", "same as"], "the same in amount or degree", builtin="eq",
      roles=[R("left"), R("right")],
      examples=["[left:The height] is {equal to} [right:the width]"]),
    F("and", "conj", ["and"], "both of two conditions hold",
      roles=[R("conjunct1"), R("conjunct2")],
      examples=["[conjunct1:She sang] {and} [conjunct2:he danced]",
                "[conjunct1:The sun rose] {and} [conjunct2:the birds sang]"]),

    # statement targets
    F("possession", "verb", ["have", "own", "possess"], "belong to someone", ["event"],
      roles=[R("owner", examples=["a house", "the man", "the farmer"]),
             R("possession", examples=["a yard", "a car", "a dog"])],
      examples=["[owner:The farmer] {owns} [possession:a tractor]",
                "[owner:The house] {has} [possession:a garden]"]),
    F("house", "noun", ["house", "home"], "a building where people live", ["building"],
      examples=["They painted the {house} white"]),
    F("building", "noun", ["building"], "a structure with walls and a roof", ["physical-object"]),
    F("yard", "noun", ["yard", "garden"], "an area of ground next to a house", ["physical-object"],
      examples=["The kids played in the {yard} behind the house"]),
    F("person", "noun", ["person", "people", "someone", "human"], "a human being",
      ["living-thing"]),
    F("child", "noun", ["child", "kid", "boy", "girl"], "a young human", ["person"]),
    F("student", "noun", ["student", "pupil"], "someone who attends a school", ["person"]),
    F("player", "noun", ["player", "athlete"], "someone who takes part in a game", ["person"],
      roles=[R("team", OPT, ["for the team", "on the team"])]),
    F("animal", "noun", ["animal", "beast"], "a living creature that is not a plant or a person",
      ["living-thing"]),
    F("food", "noun", ["food", "meal"], "something people or animals eat", ["physical-object"],
      examples=["The {food} on the table smelled delicious"]),
    F("tasty", "adj", ["tasty", "delicious"], "having a pleasant flavor", ["entity"],
      roles=[R("entity", OPT, ["food", "the cake", "the soup"])],
      examples=["The soup is {tasty}"]),
    F("fear", "noun", ["fear", "afraid", "scared"], "an unpleasant feeling of danger",
      ["entity"], examples=["The child shivered with {fear} in the dark"]),
    F("fact", "noun", ["fact", "information"], "something known to be true", ["entity"]),
    F("ball", "noun", ["ball"], "a round object used in games", ["physical-object"],
      examples=["He bounced the {ball} on the court"]),
    F("goal", "noun", ["goal"], "the target area in a game", ["physical-object"],
      examples=["The keeper stood in front of the {goal}"]),
    F("trouble", "noun", ["trouble", "problem"], "a difficult or dangerous situation", ["entity"],
      examples=["The {trouble} started after the fight"]),
    F("jar", "noun", ["jar", "container"], "a container with a wide mouth", ["physical-object"],
      examples=["She filled the {jar} with honey"]),
    F("team", "noun", ["team"], "a group that plays together", ["entity"],
      examples=["The {team} won the match"]),

    # story-domain verbs
    F("playing", "verb", ["play"], "take part in a game or sport", ["event"],
      roles=[R("participant", examples=["the children", "a person", "the team"]),
             R("game", OPT, ["soccer", "the game", "with the ball"])],
      examples=["[participant:The children] {played} [game:soccer]",
                "[participant:The team] {plays} [game:the match]"]),
    F("belonging", "verb", ["belong"], "be a member of a group", ["event"],
      roles=[R("member", examples=["the person", "the player"]),
             R("group", examples=["to a team", "to the club"])],
      examples=["[member:The player] {belongs} [group:to the club]"]),
    F("cause-motion", "verb", ["move", "push", "kick"], "make something change location",
      ["motion"],
      roles=[R("agent", examples=["the person", "the player", "the boy"]),
             R("theme", examples=["the ball", "the box", "the cart"]),
             R("goal", OPT, ["to the goal", "into the net", "to the corner"])],
      examples=["[agent:The player] {kicked} [theme:the ball] [goal:into the net]",
                "[agent:The boy] {pushed} [theme:the cart] [goal:to the corner]"]),
    F("running", "verb", ["run", "walk"], "move quickly on foot", ["motion"],
      examples=["[theme:The dog] {ran} [place:in the park]"]),
    F("giving", "verb", ["give", "hand"], "transfer something to someone", ["transfer"],
      roles=[R("donor", examples=["the teacher", "her mother"]),
             R("recipient", examples=["the student", "the boy"]),
             R("theme", examples=["a book", "the present"])],
      examples=["[donor:The teacher] {gave} [recipient:the student] [theme:a book]",
                "[donor:Her mother] {gives} [recipient:the boy] [theme:a present]"]),
    F("buying", "verb", ["buy", "purchase"], "acquire something by paying for it",
      ["acquire", "commerce"],
      examples=["[recipient:The man] {bought} [theme:a car] [money:for ten dollars]",
                "[recipient:The girl] {purchased} [theme:a ticket] [source:from the store]"]),
    F("finding", "verb", ["find", "locate"], "discover by searching", ["event"],
      roles=[R("finder", examples=["the boy", "the police"]),
             R("found", examples=["the key", "the wallet"])],
      examples=["[finder:The boy] {found} [found:the key] [place:under the mat]",
                "[finder:The police] {located} [found:the wallet]"]),
    F("liking", "verb", ["like", "love", "enjoy"], "find pleasant", ["event"],
      roles=[R("experiencer", examples=["the girl", "the children"]),
             R("stimulus", examples=["music", "the movie", "ice cream"])],
      examples=["[experiencer:The girl] {likes} [stimulus:music]",
                "[experiencer:The children] {enjoyed} [stimulus:the movie]"]),
    F("reading", "verb", ["read"], "look at and understand written words", ["event"],
      roles=[R("reader", examples=["the student", "the man"]),
             R("text", examples=["a book", "the letter", "the newspaper"])],
      examples=["[reader:The man] {read} [text:the newspaper]",
                "[reader:The student] {reads} [text:a book] [place:in the library]"]),
    F("sleeping", "verb", ["sleep", "nap"], "rest with the eyes closed", ["event"],
      roles=[R("sleeper", examples=["the baby", "the cat"])],
      examples=["[sleeper:The baby] {slept} [place:in the crib]"]),
    F("opening", "verb", ["open"], "make something no longer closed", ["event"],
      roles=[R("agent", examples=["the boy", "the woman"]),
             R("theme", examples=["the door", "the window", "the box"])],
      examples=["[agent:The woman] {opened} [theme:the door]"]),

    # policy domain
    F("co-location", "adj", ["in class", "together", "co-located"],
      "be in the same place at the same time", ["event"],
      roles=[R("person", examples=["Mary and Bobby", "the students", "the two boys"]),
             R("other", OPT, ["with Bobby", "with the teacher"])],
      examples=["[person:Mary and Bobby] were {in class}",
                "[person:The students] sat {together} [place:at lunch]"]),
    F("contact", "verb", ["contact", "meet"], "be near enough to another person to transmit illness",
      ["event"],
      roles=[R("person", examples=["the student", "Mary"]),
             R("other", examples=["a sick student", "Bobby"])],
      examples=["[person:Mary] {met} [other:Bobby] [place:at school]"]),
    F("symptomatic", "adj", ["symptomatic", "sick", "ill"], "showing symptoms of illness",
      ["event"],
      roles=[R("person", examples=["the student", "Bobby", "a child"]),
             R("symptom", OPT, ["with a fever", "with a cough"])],
      examples=["[person:The student] is {symptomatic}",
                "[person:Bobby] was {sick} [symptom:with a fever]"]),
    F("exposed", "adj", ["exposed"], "having been in contact with an infection", ["event"],
      roles=[R("person", examples=["the student", "Mary"]),
             R("source", OPT, ["to the virus", "to a sick student"])],
      examples=["[person:Mary] was {exposed} [source:to the virus]"]),
    F("quarantine", "verb", ["quarantine", "isolate"], "stay away from others to prevent spread",
      ["event"],
      roles=[R("person", examples=["the student", "Bobby", "the child"]),
             R("duration", OPT, ["for 14 days", "for five days", "for two weeks"]),
             R("population", OPT, ["from school", "from the class"])],
      examples=["[person:The student] must {quarantine} [duration:for 14 days]",
                "[person:Bobby] {isolated} [population:from the class] [duration:for five days]"]),
    F("return", "verb", ["return", "come back"], "go back to a place", ["event"],
      roles=[R("person", examples=["the student", "Mary"]),
             R("destination", OPT, ["to school", "to work", "to class"])],
      examples=["[person:The student] can {return} [destination:to school]"]),
    F("fever", "noun", ["fever", "temperature"], "an abnormally high body temperature",
      ["entity"],
      roles=[R("person", OPT, ["the student", "Bobby"])],
      examples=["The child had a high {fever} at night"]),
    F("cough", "noun", ["cough"], "expelling air from the lungs with a sudden sharp sound",
      ["entity"],
      roles=[R("person", OPT, ["the student", "Mary"])],
      examples=["The student had a dry {cough} all week"]),
    F("school", "noun", ["school"], "an institution for educating children", ["building"],
      examples=["The children walked to {school} in the rain"]),
]

# Evaluation corpus: sentences distinct from the frame examples.
EVAL = [
    ("arriving-at-a-location", "[theme:The bus] {arrived} [destination:at the station]"),
    ("arriving-at-a-location", "[theme:The hikers] {reached} [destination:the summit]"),
    ("arriving-at-a-location", "[theme:A player] {gets} [destination:to the goal]"),
    ("arriving-at-a-location", "[theme:The ship] {arrived} [destination:at the harbor]"),
    ("acquire", "[recipient:The boy] {got} [theme:a puppy]"),
    ("acquire", "[recipient:The girl] {received} [theme:a letter] [source:from her aunt]"),
    ("acquire", "[recipient:A player] {gets} [theme:a ball]"),
    ("transition-to-state", "[entity:The sky] {turned} [final_state:dark]"),
    ("transition-to-state", "[entity:The man] {became} [final_state:angry]"),
    ("transition-to-state", "[entity:A player] {gets} [final_state:into trouble]"),
    ("taking", "[agent:The child] {takes} [theme:the cookie] [source:from the jar]"),
    ("taking", "[agent:The thief] {grabbed} [theme:the purse] [source:from the table]"),
    ("taking", "[agent:A boy] {took} [theme:the candy] [source:from the bowl]"),
    ("bringing", "[agent:The driver] {took} [theme:the children] [destination:to the airport]"),
    ("bringing", "[agent:The mother] {carried} [theme:the luggage] [destination:to the station]"),
    ("helping", "[helper:person1] {helps} [benefited:person2]"),
    ("helping", "[helper:The nurse] {helped} [benefited:the patient]"),
    ("helping", "[helper:A friend] {assisted} [benefited:the student] [goal:with the homework]"),
    ("thanking", "[thanker:person2] {thanks} [thankee:person1]"),
    ("thanking", "[thanker:The student] {thanked} [thankee:the teacher] [reason:for the help]"),
    ("covering", "[coverer:object1] does not {cover} [covered:object2]"),
    ("covering", "[coverer:The cloud] {covered} [covered:the moon]"),
    ("covering", "[coverer:A blanket] {hides} [covered:the bed]"),
    ("seeing", "[perceiver:someone] can {see} [phenomenon:object2]"),
    ("seeing", "[perceiver:The guard] {noticed} [phenomenon:the thief]"),
    ("seeing", "[perceiver:The girl] {saw} [phenomenon:a bird] [place:in the tree]"),
    ("knowing", "[cognizer:person1] does not {know} [content:a fact]"),
    ("knowing", "[cognizer:The student] {knows} [content:the answer]"),
    ("telling", "[speaker:person2] {tells} [addressee:person1] [message:the fact]"),
    ("telling", "[speaker:The teacher] {told} [addressee:the class] [message:the story]"),
    ("learning", "[learner:person1] {learns} [content:the fact]"),
    ("learning", "[learner:The child] {learned} [content:the lesson]"),
    ("approaching", "[theme:animal1] {approaches} [goal:animal2]"),
    ("approaching", "[theme:The wolf] {approached} [goal:the sheep]"),
    ("wanting", "[experiencer:The child] {wants} [desired:a toy]"),
    ("wanting", "[experiencer:The dog] {wanted} [desired:a bone]"),
    ("eating", "[ingestor:The boy] {ate} [ingestibles:an apple]"),
    ("eating", "[ingestor:The dog] {eats} [ingestibles:the meat]"),
    ("eating", "[ingestor:The children] {devoured} [ingestibles:the cake]"),
    ("feeling", "[experiencer:animal2] {feels} [emotion:fear]"),
    ("feeling", "[experiencer:The boy] {felt} [emotion:sad]"),
    ("possession", "[owner:a house] {has} [possession:a yard]"),
    ("possession", "[owner:The farmer] {owns} [possession:a horse]"),
    ("playing", "[participant:The children] {played} [game:soccer]"),
    ("playing", "[participant:The team] {plays} [game:the game]"),
    ("belonging", "[member:The player] {belongs} [group:to a team]"),
    ("cause-motion", "[agent:The player] {kicked} [theme:the ball] [goal:to the goal]"),
    ("cause-motion", "[agent:The man] {pushed} [theme:the box] [goal:to the corner]"),
    ("giving", "[donor:The teacher] {gave} [recipient:the boy] [theme:a book]"),
    ("buying", "[recipient:The woman] {bought} [theme:a dress] [money:for ten dollars]"),
    ("finding", "[finder:The boy] {found} [found:the wallet]"),
    ("liking", "[experiencer:The children] {like} [stimulus:ice cream]"),
    ("reading", "[reader:The girl] {read} [text:the letter]"),
    ("opening", "[agent:The boy] {opened} [theme:the window]"),
    ("co-location", "[person:Mary and Bobby] were {in class}"),
    ("symptomatic", "[person:Bobby] is {symptomatic}"),
    ("exposed", "[person:Mary] was {exposed} [source:to the virus]"),
    ("quarantine", "[person:The student] must {quarantine} [duration:for 14 days]"),
    ("return", "[person:Mary] can {return} [destination:to school]"),
    ("sleeping", "[sleeper:The cat] {slept} [place:on the sofa]"),
]

CORPUS = """\
A player gets a ball.
A player gets to the goal.
A player gets into trouble.
The team wins the match.
The coach helps the player.
The player thanks the coach.
The children play soccer in the park.
The boy kicks the ball to the goal.
The girl eats a cookie.
The child takes the cookie from the jar.
The mother sees the empty jar.
The child feels guilty.
The mother tells the child the rule.
The child learns the rule.
The dog wants the bone.
The dog approaches the cat.
The cat feels fear.
The cat runs into the yard.
The house has a yard.
The family owns a dog.
The boy finds a key.
The key opens the door.
The girl reads a book.
The teacher gives the student a book.
The student thanks the teacher.
The student knows the answer.
The teacher helps the student with the homework.
The friends share the food.
People want to eat tasty food.
The baby sleeps in the crib.
The man buys a car.
The car arrives at the station.
The train reaches the city.
The boy becomes angry.
The milk turns sour.
The girl gets a gift.
The boy gets sick.
The family gets home.
A cloud covers the sun.
The blanket covers the bed.
Someone sees the bird.
The bird flies to the tree.
The wolf approaches the sheep.
The sheep feels afraid.
The farmer feeds the horse.
The horse eats the hay.
The boy loves the dog.
The dog likes the park.
The children walk to school.
The students sit in class.
The nurse helps the patient.
The patient thanks the nurse.
The driver takes the passengers to the airport.
The father carries the luggage to the car.
The thief grabs the purse.
The guard notices the thief.
The police find the wallet.
The girl tells her friend a secret.
The friend keeps the secret.
The boy gives the girl a flower.
The girl smiles at the boy.
The team loses the game.
The player feels sad.
The fans cheer for the team.
The cook makes a tasty meal.
The guests eat the meal.
The guests thank the cook.
The kids build a sandcastle.
The wave destroys the sandcastle.
The kids feel sad.
The student reads the letter.
The student learns the truth.
The boy opens the box.
The box holds a toy.
The boy wants the toy.
The storm damages the house.
The family repairs the house.
The girl feels happy.
The child hides the cookie.
The mother finds the cookie.
"""

# Topic mixture for the vector fixture. Each topic is a random direction.
TOPICS = [
    "person", "young", "animal", "food", "container", "object", "location", "motion",
    "possess", "change", "emotion", "cognition", "speech", "vision", "cover", "social",
    "health", "school", "sport", "house", "size", "data", "time", "money", "vehicle",
    "nature", "bad", "music", "read", "sleep", "open", "placeholder",
]

W = {}


def words(topic_weights, *ws):
    for w in ws:
        W[w] = dict(topic_weights)


# people and placeholders
words({"person": 1.0}, "person", "people", "someone", "human", "man", "woman", "friend",
      "neighbor", "guest", "driver", "father", "mother", "family", "brother", "son", "aunt",
      "passenger", "thief", "police", "guard", "detective", "cook", "farmer", "fan", "nurse",
      "patient", "coach", "helper", "hiker", "runner", "keeper")
words({"person": 0.9, "placeholder": 0.6}, "person1", "person2")
words({"person": 0.9, "young": 0.8}, "child", "kid", "boy", "girl", "baby")
words({"person": 0.8, "school": 0.8}, "student", "pupil", "teacher", "class", "lesson")
words({"person": 0.9, "school": 0.3, "placeholder": 0.3}, "mary", "bobby")
words({"animal": 1.0}, "animal", "beast", "creature", "organism", "wolf", "sheep", "dog",
      "cat", "horse", "puppy", "bird", "bone", "hay")
words({"animal": 0.9, "placeholder": 0.6}, "animal1", "animal2")
words({"object": 0.9, "placeholder": 0.6}, "object1", "object2")
words({"food": 1.0}, "food", "meal", "cookie", "biscuit", "cake", "apple", "meat", "candy",
      "honey", "sugar", "butter", "chocolate", "chip", "oatmeal", "soup", "ice", "cream",
      "lunch", "eat", "devour", "consume", "bake", "oven", "taste")
words({"food": 0.8, "emotion": 0.4}, "tasty", "delicious")
words({"container": 1.0}, "jar", "container", "box", "bowl", "shelf", "crib", "cart", "luggage",
      "wallet", "fill", "hold")
words({"object": 1.0}, "object", "item", "thing", "entity", "toy", "key", "bike", "gift",
      "present", "flower", "purse", "painting", "museum", "book", "ticket", "dress", "tractor", "blanket", "bed", "door",
      "window", "curtain", "mat", "table", "sofa", "sandcastle")
words({"location": 1.0}, "station", "airport", "harbor", "summit", "city", "corner",
      "destination", "finish", "line", "place", "park", "tree", "front", "court", "room", "beach", "street")
words({"location": 0.6, "motion": 0.8}, "arrive", "reach", "approach")
words({"motion": 1.0}, "go", "travel", "move", "run", "walk", "fly", "bring", "carry",
      "push", "kick", "sit", "stand", "bounce", "come", "back")
words({"motion": 0.6, "location": 0.3, "vehicle": 0.8}, "train", "bus", "car", "plane",
      "ship")
words({"possess": 1.0}, "acquire", "obtain", "receive", "own", "possess", "have", "keep",
      "give", "hand", "transfer", "share")
words({"possess": 0.8, "money": 0.8}, "buy", "purchase", "trade", "dollar", "coin", "money",
      "price", "cost", "budget")
words({"possess": 0.6, "motion": 0.6, "change": 0.6}, "get")
words({"possess": 0.8, "motion": 0.4}, "take", "grab", "seize")
words({"change": 1.0}, "become", "turn", "happen", "occur", "accident", "sour", "dark")
words({"change": 0.6, "bad": 0.9}, "trouble", "problem", "fight", "damage", "destroy",
      "storm", "wave")
words({"emotion": 1.0}, "feel", "fear", "afraid", "scared", "scare", "sad", "happy", "anger",
      "angry", "guilty", "smile", "cheer", "shiver", "comfort", "surprise")
words({"emotion": 0.7, "cognition": 0.4}, "want", "desire", "wish", "like", "love", "enjoy")
words({"cognition": 1.0}, "know", "think", "learn", "discover", "fact", "information",
      "answer", "truth", "rule", "secret")
words({"speech": 1.0}, "tell", "inform", "say", "speak", "story", "thank", "letter",
      "newspaper")
words({"vision": 1.0}, "see", "notice", "spot", "perceive", "sense", "light", "watch",
      "look", "eye")
words({"cover": 1.0}, "cover", "obscure", "hide", "cloud", "sun", "moon")
words({"social": 1.0}, "help", "assist", "aid", "homework", "chore", "grocery")
words({"health": 1.0}, "symptomatic", "sick", "ill", "fever", "cough", "temperature",
      "virus", "quarantine", "isolate", "exposed", "contact", "meet", "day", "week", "14",
      "five", "two", "high", "dry", "co-located", "together")
words({"school": 1.0}, "school", "library", "return", "attend", "work")
words({"sport": 1.0}, "soccer", "match", "game", "team", "club", "net", "win", "lose",
      "belong", "play")
words({"sport": 0.7, "person": 0.7}, "player", "athlete", "striker")
words({"sport": 0.7, "object": 0.6}, "ball")
words({"sport": 0.7, "location": 0.8}, "goal")
words({"house": 1.0}, "house", "home", "yard", "garden", "building", "kitchen", "build",
      "paint", "white", "repair", "live", "feed")
words({"size": 1.0}, "size", "large", "big", "small", "height", "width", "great", "less",
      "few", "equal", "same", "old", "new", "empty", "greater", "ten")
words({"data": 1.0}, "browser", "website", "server", "login", "file", "data", "restore",
      "store", "save")
words({"time": 1.0}, "yesterday", "monday", "morning", "night", "rain", "all", "first")
words({"music": 1.0}, "music", "movie", "sing", "dance")
words({"read": 1.0}, "read")
words({"sleep": 1.0}, "sleep", "nap")
words({"open": 1.0}, "open", "find", "locate")
words({"nature": 1.0}, "plant", "grass", "rise", "river", "sky", "puddle", "milk", "smell", "start", "make")


def gauss_unit(rng):
    v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
    n = sum(x * x for x in v) ** 0.5
    return [x / n for x in v]


def build_vectors():
    rng = random.Random(SEED)
    topic_vec = {t: gauss_unit(rng) for t in TOPICS}
    lines = []
    for word in sorted(W):
        noise = gauss_unit(rng)
        v = [0.3 * x for x in noise]
        for t, w in W[word].items():
            v = [a + w * b for a, b in zip(v, topic_vec[t])]
        lines.append(word + " " + " ".join(f"{x:.5f}" for x in v))
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "ontology.json").write_text(json.dumps({"frames": FRAMES}, indent=1) + "\n")
    with open(OUT / "eval.ndjson", "w") as f:
        for frame, src in EVAL:
            text, trig, roles = parse_marked(src)
            f.write(json.dumps({"frame": frame, "text": text, "trigger": trig, "roles": roles}) + "\n")
    (OUT / "corpus.txt").write_text(CORPUS)
    (OUT / "vectors.txt").write_text(build_vectors())
    print(f"{len(FRAMES)} frames, {len(EVAL)} eval sentences, {len(W)} vectors")


if __name__ == "__main__":
    main()
