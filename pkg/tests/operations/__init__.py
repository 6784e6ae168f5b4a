# Operations tests package